"""From-scratch neural stack on numpy: embedding, Conv1D, LSTM/BiLSTM,
dropout, dense softmax classification, Adam with L2, gradient checking."""

from .layers import (NeuralError, Parameter, Embedding, Conv1D, MaxPool1D,
                     LSTM, BiLSTM, Dropout, Dense, MaskedReadout,
                     softmax, cross_entropy)
from .models import (ClassifierSpec, SentimentSpec, Net, build_classifier,
                     build_sentiment, tiny_classifier_spec, tiny_sentiment_spec)
from .optim import Adam
from .train import NetVocab, TrainResult, pad_batch, train, evaluate_net, predict
from .gradcheck import grad_check, LayerHarness
from .embeddings import load_word_vectors

__all__ = [
    "NeuralError", "Parameter", "Embedding", "Conv1D", "MaxPool1D", "LSTM",
    "BiLSTM", "Dropout", "Dense", "MaskedReadout", "softmax", "cross_entropy",
    "ClassifierSpec", "SentimentSpec", "Net", "build_classifier",
    "build_sentiment", "tiny_classifier_spec", "tiny_sentiment_spec", "Adam",
    "NetVocab", "TrainResult", "pad_batch", "train", "evaluate_net", "predict",
    "grad_check", "LayerHarness", "load_word_vectors",
]
