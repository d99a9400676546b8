from .checkpoint import load_model, save_model
from .crf import CrfParams, crf_log_likelihood, crf_log_partition, crf_nll_grad, crf_score, viterbi_decode
from .lstm import LstmParams, lstm_forward
from .model import TagSet, TaggerModel, loss_and_grad, model_emissions, predict, predict_batch
from .train import Adam, TrainConfig, TrainLog, train

__all__ = [
    "Adam", "CrfParams", "LstmParams", "TagSet", "TaggerModel", "TrainConfig", "TrainLog",
    "crf_log_likelihood", "crf_log_partition", "crf_nll_grad", "crf_score", "load_model",
    "loss_and_grad", "lstm_forward", "model_emissions", "predict", "predict_batch",
    "save_model", "train", "viterbi_decode",
]
