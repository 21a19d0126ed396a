"""Tiny label-attention text classifier used as the attribution source.

Architecture: hashed piece embeddings -> transformer encoder -> one learned
query vector per code attending over the piece states (softmax); the
attended context is scored against the query for a per-code logit. The
per-code attention distribution doubles as the attention signal exported for
each token, and input-times-gradient attributions are taken with respect to
the piece embeddings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import torch
from torch import nn


@dataclass
class CoderConfig:
    codes: list[str]
    vocab_size: int = 512
    max_piece_len: int = 4
    d_model: int = 32
    nhead: int = 2
    num_layers: int = 1
    dim_feedforward: int = 64
    extra: dict = field(default_factory=dict)


class TinyCoder(nn.Module):
    def __init__(self, config: CoderConfig):
        super().__init__()
        if not config.codes:
            raise ValueError("config.codes must be nonempty")
        self.config = config
        self.embedding = nn.Embedding(config.vocab_size, config.d_model)
        layer = nn.TransformerEncoderLayer(
            d_model=config.d_model,
            nhead=config.nhead,
            dim_feedforward=config.dim_feedforward,
            dropout=0.0,
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=config.num_layers)
        self.label_queries = nn.Parameter(torch.empty(len(config.codes), config.d_model))
        self.label_bias = nn.Parameter(torch.zeros(len(config.codes)))
        nn.init.normal_(self.label_queries, std=0.1)

    def forward(self, piece_ids: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        """piece_ids (n_pieces,) -> (logits per code, attention per code x piece, embeddings)."""
        emb = self.embedding(piece_ids)  # (n, d)
        states = self.encoder(emb.unsqueeze(0)).squeeze(0)  # (n, d)
        scores = self.label_queries @ states.T / math.sqrt(self.config.d_model)  # (codes, n)
        attention = torch.softmax(scores, dim=-1)
        context = attention @ states  # (codes, d)
        logits = (context * self.label_queries).sum(dim=-1) + self.label_bias
        return logits, attention, emb

    def attribute(self, piece_ids: list[int]) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        """Probabilities, attention, and input-times-gradient L2 norms per code.

        Returns (probs (codes,), attention (codes, n_pieces), ixg_l2 (codes, n_pieces)).
        Gradients are taken per code with respect to the piece embeddings; the
        attribution of a piece is || embedding * d logit / d embedding ||_2.
        """
        ids = torch.as_tensor(piece_ids, dtype=torch.long)
        emb_weight = self.embedding(ids).detach().requires_grad_(True)
        states = self.encoder(emb_weight.unsqueeze(0)).squeeze(0)
        scores = self.label_queries @ states.T / math.sqrt(self.config.d_model)
        attention = torch.softmax(scores, dim=-1)
        context = attention @ states
        logits = (context * self.label_queries).sum(dim=-1) + self.label_bias

        ixg_rows = []
        for c in range(len(self.config.codes)):
            (grad,) = torch.autograd.grad(logits[c], emb_weight, retain_graph=True)
            ixg_rows.append((emb_weight * grad).norm(dim=-1))
        ixg = torch.stack(ixg_rows).detach()
        return torch.sigmoid(logits).detach(), attention.detach(), ixg


def pool_to_words(per_piece: torch.Tensor, word_index: list[int], n_words: int) -> torch.Tensor:
    """Pool piece-level values onto word positions by max over each word's pieces."""
    pooled = per_piece.new_zeros(per_piece.shape[:-1] + (n_words,))
    pooled = pooled - torch.inf
    idx = torch.as_tensor(word_index, dtype=torch.long)
    expanded = idx.expand(per_piece.shape[:-1] + idx.shape)
    pooled.scatter_reduce_(-1, expanded, per_piece, reduce="amax", include_self=False)
    return pooled
