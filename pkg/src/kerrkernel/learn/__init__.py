"""Learning protocols: sequential parity feedback and kernel SVM training."""
from .metrics import Metrics, evaluate
from .sequential import EpochRecord, sequential_run, write_trace_csv
from .svm import SvmModel, dual_objective, kkt_gap, smo_train, svm_decision, svm_predict

__all__ = [
    "EpochRecord",
    "Metrics",
    "SvmModel",
    "dual_objective",
    "evaluate",
    "kkt_gap",
    "sequential_run",
    "smo_train",
    "svm_decision",
    "svm_predict",
    "write_trace_csv",
]
