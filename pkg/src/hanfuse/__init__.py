"""Multi-feature character embeddings and a BiLSTM-CRF tagger for Chinese NER."""

__version__ = "0.1.0"
