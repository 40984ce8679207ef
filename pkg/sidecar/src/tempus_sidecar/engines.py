"""Model-mode engines backed by transformer checkpoints.

Imports of torch/transformers happen lazily so stub mode carries no model
dependencies.  Model identifiers are configuration, never hard-coded.
"""

from __future__ import annotations

import math


class EngineError(RuntimeError):
    pass


class AbsaEngine:
    """Aspect-based sentiment classifier over (text, aspect) pairs."""

    def __init__(self, model_id: str):
        try:
            import torch
            from transformers import AutoModelForSequenceClassification, AutoTokenizer
        except ImportError as exc:
            raise EngineError(f"model mode needs transformers+torch: {exc}") from exc
        self.model_id = model_id
        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModelForSequenceClassification.from_pretrained(model_id)
        self.model.eval()
        labels = {i: label.lower() for i, label in self.model.config.id2label.items()}
        wanted = {"negative", "neutral", "positive"}
        if set(labels.values()) != wanted:
            raise EngineError(f"{model_id}: labels {sorted(labels.values())} != {sorted(wanted)}")
        self._index = {label: i for i, label in labels.items()}

    def score(self, text: str, aspect: str) -> tuple[float, float, float]:
        torch = self._torch
        encoded = self.tokenizer(text, aspect, return_tensors="pt", truncation=True)
        with torch.no_grad():
            logits = self.model(**encoded).logits[0]
        probs = torch.softmax(logits, dim=-1).tolist()
        return (
            probs[self._index["negative"]],
            probs[self._index["neutral"]],
            probs[self._index["positive"]],
        )


class LogProbEngine:
    """Per-token log-probabilities of a continuation under a causal LM."""

    def __init__(self, model_id: str):
        try:
            import torch
            from transformers import AutoModelForCausalLM, AutoTokenizer
        except ImportError as exc:
            raise EngineError(f"model mode needs transformers+torch: {exc}") from exc
        self.model_id = model_id
        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModelForCausalLM.from_pretrained(model_id)
        self.model.eval()

    def score(self, context: str, continuation: str) -> tuple[list[str], list[float]]:
        torch = self._torch
        tok = self.tokenizer
        context_ids = tok(context, add_special_tokens=False)["input_ids"] if context else []
        full_ids = tok(context + continuation, add_special_tokens=False)["input_ids"]
        # re-tokenization at the boundary can shift; recover the suffix ids
        cont_ids = full_ids[len(context_ids):]
        if not cont_ids:
            cont_ids = tok(continuation, add_special_tokens=False)["input_ids"]
            full_ids = context_ids + cont_ids
        if not context_ids:
            bos = tok.bos_token_id
            if bos is None:
                raise EngineError(f"{self.model_id}: empty context and no BOS token")
            full_ids = [bos] + full_ids
        input_ids = torch.tensor([full_ids])
        with torch.no_grad():
            logits = self.model(input_ids).logits[0]
        logprobs = torch.log_softmax(logits.float(), dim=-1)
        n_cont = len(cont_ids)
        out: list[float] = []
        for pos in range(len(full_ids) - n_cont, len(full_ids)):
            token_id = full_ids[pos]
            value = float(logprobs[pos - 1, token_id])
            out.append(min(value, 0.0) if math.isfinite(value) else -1e9)
        tokens = [tok.decode([i]) for i in cont_ids]
        return tokens, out
