from __future__ import annotations

import os

import pytest

# Keep test runs hermetic: never try to reach a model hub.
os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

_TRAIN_LINES = [
    "due to rain sales fell",
    "visitors increased at the weekend",
    "prices rose sharply this month",
    "the number of customers is recovering",
    "猛暑 の 影響 で 来客 数 が 減少",
    "円安 により 観光 客 が 増加",
]


def build_tiny_model(directory: str) -> str:
    """Create a small randomly-initialized sentence-transformers model on disk.

    Real architecture (BERT encoder + mean pooling + BPE tokenizer), no
    network access, fixed seed, so tests exercise the true model path
    deterministically. Production deployments point --model at any
    pretrained sentence-embedding model instead.
    """
    import torch
    from tokenizers import Tokenizer, models, pre_tokenizers, processors, trainers
    from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

    tokenizer = Tokenizer(models.BPE(unk_token="[UNK]"))
    tokenizer.pre_tokenizer = pre_tokenizers.Whitespace()
    trainer = trainers.BpeTrainer(
        special_tokens=["[UNK]", "[CLS]", "[SEP]", "[PAD]"], vocab_size=400
    )
    tokenizer.train_from_iterator(_TRAIN_LINES, trainer)
    tokenizer.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[
            ("[CLS]", tokenizer.token_to_id("[CLS]")),
            ("[SEP]", tokenizer.token_to_id("[SEP]")),
        ],
    )

    encoder_dir = os.path.join(directory, "encoder")
    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=tokenizer.get_vocab_size(),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=128,
    )
    BertModel(config).save_pretrained(encoder_dir)
    tokenizer.save(os.path.join(encoder_dir, "tokenizer.json"))
    PreTrainedTokenizerFast(
        tokenizer_file=os.path.join(encoder_dir, "tokenizer.json"),
        unk_token="[UNK]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        pad_token="[PAD]",
        model_max_length=128,
    ).save_pretrained(encoder_dir)

    from sentence_transformers import SentenceTransformer

    try:  # module path renamed in newer sentence-transformers releases
        from sentence_transformers.sentence_transformer.modules import Pooling, Transformer
    except ImportError:
        from sentence_transformers.models import Pooling, Transformer

    word = Transformer(encoder_dir, max_seq_length=128)
    if hasattr(word, "get_embedding_dimension"):
        word_dim = word.get_embedding_dimension()
    else:
        word_dim = word.get_word_embedding_dimension()
    pooling = Pooling(word_dim, pooling_mode="mean")
    model_dir = os.path.join(directory, "model")
    SentenceTransformer(modules=[word, pooling]).save(model_dir)
    return model_dir


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory) -> str:
    return build_tiny_model(str(tmp_path_factory.mktemp("tiny-model")))
