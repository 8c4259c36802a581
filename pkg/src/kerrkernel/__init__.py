"""Kerr-kernel quantum learning machine simulator."""
