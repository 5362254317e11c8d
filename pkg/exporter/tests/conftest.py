import pytest


@pytest.fixture(scope="session")
def encoder_dir(tmp_path_factory):
    """A tiny randomly initialized BERT saved to disk; no network needed."""
    import torch
    from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, processors
    from transformers import BertConfig, BertModel, BertTokenizerFast

    d = tmp_path_factory.mktemp("tiny-bert")
    pieces = [
        "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
        "alpha", "beta", "gamma", "delta", "epsilon", "zeta",
        "filler", "solo", "mid", "em", "##bed", "##ding",
        "one", "two", "three", "four", "five",
    ]
    wordpiece = Tokenizer(models.WordPiece(
        vocab={p: i for i, p in enumerate(pieces)}, unk_token="[UNK]"))
    wordpiece.normalizer = normalizers.BertNormalizer(lowercase=True)
    wordpiece.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    wordpiece.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]", pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", 2), ("[SEP]", 3)])
    tokenizer = BertTokenizerFast(
        tokenizer_object=wordpiece, unk_token="[UNK]", pad_token="[PAD]",
        cls_token="[CLS]", sep_token="[SEP]", mask_token="[MASK]")
    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=len(pieces),
        hidden_size=16,
        num_hidden_layers=1,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=24,
        pad_token_id=0,
    )
    model = BertModel(config)
    tokenizer.save_pretrained(d)
    model.save_pretrained(d)
    return str(d)
