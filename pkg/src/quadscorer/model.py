"""A tiny trainable conditional sequence generator.

The model is deliberately small so that the full pipeline (training,
scoring, beam search) runs in seconds on a CPU: two bag-of-words context
vectors feed a one-step MLP decoder that predicts each label token from
the previous one and its position,

    c        = mean(emb[input tokens])
    c'       = weighted mean, earlier input tokens weighted higher
    m_t      = mean(emb[y_{<t}])     (zero at the first step)
    h_t      = tanh(W_prev emb[y_{t-1}] + W_ctx c + W_ord c' + W_hist m_t
                    + pos_t + b_h)
    p(y_t|.) = softmax(W_out h_t + b_out)

The position term lets the decoder tell the template's repeated
separator tokens apart; the order-weighted context tells it which input
token came first; and the emitted-prefix mean m_t is its memory of what
the label already covers (without it, a multi-quad label would re-emit
the first quad's fields). All state is a running mean rather than a
recurrent nonlinearity, so teacher forcing still vectorizes over the
time steps of a sequence and gradients of a sequence's log-likelihood
come out in closed form, which is all the ranking objectives need.
"""

from __future__ import annotations

import numpy as np

from .quads import Review

BOS, EOS, UNK = 0, 1, 2
_SPECIALS = ("<s>", "</s>", "<unk>")

_PROB_FLOOR = 1e-300  # guard against float underflow in softmax output


def tokenize(text: str) -> list[str]:
    return text.split()


class TinyConditionalGenerator:
    """Numpy seq2seq stub implementing the generator-handle protocol."""

    def __init__(self, vocab: list[str], dim: int = 24, hidden: int = 48,
                 seed: int = 0, max_len: int = 32):
        if vocab[: len(_SPECIALS)] != list(_SPECIALS):
            vocab = list(_SPECIALS) + [t for t in vocab if t not in _SPECIALS]
        self.vocab = list(vocab)
        self.token_ids = {t: i for i, t in enumerate(self.vocab)}
        self.dim = dim
        self.hidden = hidden
        self.max_len = max_len
        rng = np.random.default_rng(seed)
        v = len(self.vocab)
        scale = 0.1
        self.params = {
            "emb": rng.normal(0.0, scale, (v, dim)),
            "w_prev": rng.normal(0.0, scale, (hidden, dim)),
            "w_ctx": rng.normal(0.0, scale, (hidden, dim)),
            "w_ord": rng.normal(0.0, scale, (hidden, dim)),
            "w_hist": rng.normal(0.0, scale, (hidden, dim)),
            "pos": np.zeros((max_len + 1, hidden)),
            "b_h": np.zeros(hidden),
            "w_out": rng.normal(0.0, scale, (v, hidden)),
            "b_out": np.zeros(v),
        }

    @classmethod
    def from_corpus(cls, texts, **kwargs) -> "TinyConditionalGenerator":
        """Build the vocabulary from an iterable of texts."""
        seen: dict[str, None] = {}
        for text in texts:
            for tok in tokenize(text):
                seen.setdefault(tok)
        return cls(list(_SPECIALS) + sorted(seen), **kwargs)

    # -- forward ---------------------------------------------------------

    def _ids(self, text: str) -> list[int]:
        return [self.token_ids.get(t, UNK) for t in tokenize(text)]

    @staticmethod
    def _order_weights(n: int) -> np.ndarray:
        w = np.linspace(1.0, 0.2, n)
        return w / w.sum()

    def _context(self, review: Review) -> tuple[np.ndarray, np.ndarray]:
        ids = self._ids(review.text)
        if not ids:
            zero = np.zeros(self.dim)
            return zero, zero
        vectors = self.params["emb"][ids]
        return vectors.mean(axis=0), self._order_weights(len(ids)) @ vectors

    def _positions(self, steps) -> np.ndarray:
        return self.params["pos"][np.minimum(steps, self.max_len)]

    def _step_logits(self, prev_ids, ctx, hist, steps) -> np.ndarray:
        p = self.params
        c_mean, c_ord = ctx
        z = (p["emb"][prev_ids] @ p["w_prev"].T + c_mean @ p["w_ctx"].T
             + c_ord @ p["w_ord"].T + hist @ p["w_hist"].T
             + self._positions(steps) + p["b_h"])
        h = np.tanh(z)
        return h @ p["w_out"].T + p["b_out"]

    def _prefix_means(self, y_ids) -> np.ndarray:
        """Row t holds mean(emb[y_{<t}]); the first row is zero."""
        means = np.zeros((len(y_ids) + 1, self.dim))
        if y_ids:
            cums = np.cumsum(self.params["emb"][y_ids], axis=0)
            means[1:] = cums / np.arange(1, len(y_ids) + 1)[:, None]
        return means

    def _token_logprobs(self, review: Review, text: str) -> np.ndarray:
        """Log-probabilities of each label token plus the closing EOS."""
        y = self._ids(text)
        prevs = [BOS] + y
        targets = y + [EOS]
        logits = self._step_logits(prevs, self._context(review),
                                   self._prefix_means(y), np.arange(len(prevs)))
        shifted = logits - logits.max(axis=1, keepdims=True)
        log_z = np.log(np.exp(shifted).sum(axis=1))
        return shifted[np.arange(len(targets)), targets] - log_z

    def token_probabilities(self, review: Review, label_text: str) -> list[float]:
        lp = self._token_logprobs(review, label_text)[:-1]  # visible tokens only
        return list(np.maximum(np.exp(lp), _PROB_FLOOR))

    def sequence_logprob(self, review: Review, label_text: str) -> float:
        """Full sequence log-likelihood, EOS step included."""
        return float(self._token_logprobs(review, label_text).sum())

    # -- gradients ---------------------------------------------------------

    def zero_grads(self) -> dict[str, np.ndarray]:
        return {k: np.zeros_like(v) for k, v in self.params.items()}

    def accumulate_logprob_grad(self, review: Review, label_text: str,
                                weight: float, grads: dict[str, np.ndarray]) -> float:
        """Add ``weight * d(log p(y|x))/d(params)`` into ``grads``.

        Returns the sequence log-likelihood so callers get the forward
        value from the same pass.
        """
        p = self.params
        x_ids = self._ids(review.text)
        y = self._ids(label_text)
        prevs = np.array([BOS] + y)
        targets = np.array(y + [EOS])
        if x_ids:
            x_vectors = p["emb"][x_ids]
            order_w = self._order_weights(len(x_ids))
            c_mean = x_vectors.mean(axis=0)
            c_ord = order_w @ x_vectors
        else:
            c_mean = c_ord = np.zeros(self.dim)

        e_prev = p["emb"][prevs]
        hist = self._prefix_means(y)
        pos_rows = np.minimum(np.arange(len(prevs)), self.max_len)
        z = (e_prev @ p["w_prev"].T + c_mean @ p["w_ctx"].T + c_ord @ p["w_ord"].T
             + hist @ p["w_hist"].T + p["pos"][pos_rows] + p["b_h"])
        h = np.tanh(z)
        logits = h @ p["w_out"].T + p["b_out"]
        shifted = logits - logits.max(axis=1, keepdims=True)
        expl = np.exp(shifted)
        probs = expl / expl.sum(axis=1, keepdims=True)
        steps = np.arange(len(targets))
        logp = float(np.log(probs[steps, targets]).sum())

        # d logp / d logits = onehot(target) - softmax
        dlogits = -probs
        dlogits[steps, targets] += 1.0
        dlogits *= weight

        grads["w_out"] += dlogits.T @ h
        grads["b_out"] += dlogits.sum(axis=0)
        dh = dlogits @ p["w_out"]
        dz = dh * (1.0 - h * h)
        dz_sum = dz.sum(axis=0)
        grads["w_prev"] += dz.T @ e_prev
        grads["w_ctx"] += np.outer(dz_sum, c_mean)
        grads["w_ord"] += np.outer(dz_sum, c_ord)
        grads["w_hist"] += dz.T @ hist
        grads["b_h"] += dz_sum
        np.add.at(grads["pos"], pos_rows, dz)
        np.add.at(grads["emb"], prevs, dz @ p["w_prev"])
        if y:
            # emb[y_j] enters every prefix mean m_t with t > j at weight 1/t
            d_hist = (dz @ p["w_hist"])[1:] / np.arange(1, len(y) + 1)[:, None]
            tail_sums = np.cumsum(d_hist[::-1], axis=0)[::-1]
            np.add.at(grads["emb"], y, tail_sums)
        if x_ids:
            d_mean = (dz_sum @ p["w_ctx"]) / len(x_ids)
            d_ord = dz_sum @ p["w_ord"]
            np.add.at(grads["emb"], x_ids,
                      d_mean + order_w[:, None] * d_ord)
        return logp

    # -- generation --------------------------------------------------------

    def generate(self, review: Review, k: int) -> list[tuple[str, float]]:
        """Beam search; returns (label_text, total log-likelihood) pairs."""
        ctx = self._context(review)
        emb = self.params["emb"]
        # a beam is (token ids, logp, running sum of emitted embeddings)
        beams = [([], 0.0, np.zeros(self.dim))]
        finished: list[tuple[list[int], float]] = []
        width = max(k, 1)
        for step in range(self.max_len):
            if not beams:
                break
            prev_ids = [b[0][-1] if b[0] else BOS for b in beams]
            hist = (np.stack([b[2] for b in beams]) / step if step
                    else np.zeros((len(beams), self.dim)))
            logits = self._step_logits(prev_ids, ctx, hist, step)
            shifted = logits - logits.max(axis=1, keepdims=True)
            logps = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
            scores = np.array([b[1] for b in beams])[:, None] + logps
            flat = np.argsort(scores, axis=None)[::-1][: width * 2]
            next_beams = []
            for idx in flat:
                b, tok = divmod(int(idx), len(self.vocab))
                if tok == BOS or tok == UNK:
                    continue
                seq, score = beams[b][0] + [tok], float(scores[b, tok])
                if tok == EOS:
                    if seq[:-1]:  # an immediately-closed beam is no label
                        finished.append((seq[:-1], score))
                elif len(next_beams) < width:
                    next_beams.append((seq, score, beams[b][2] + emb[tok]))
            beams = next_beams
            if len(finished) >= width and beams and (
                max(s for _, s, _ in beams) < min(s for _, s in sorted(
                    finished, key=lambda f: -f[1])[:width])
            ):
                break
        # beams that never emitted EOS still count, with their partial score
        finished.extend((seq, score) for seq, score, _ in beams if seq)
        finished.sort(key=lambda f: -f[1])
        out = []
        for seq, score in finished[:k]:
            out.append((" ".join(self.vocab[t] for t in seq), score))
        return out

    # -- persistence -------------------------------------------------------

    def copy_params(self) -> dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.params.items()}

    def set_params(self, params: dict[str, np.ndarray]) -> None:
        self.params = {k: v.copy() for k, v in params.items()}

    def clone(self) -> "TinyConditionalGenerator":
        dup = TinyConditionalGenerator(self.vocab, dim=self.dim, hidden=self.hidden,
                                       max_len=self.max_len)
        dup.set_params(self.params)
        return dup

    def save(self, path) -> None:
        np.savez(
            path,
            vocab=np.array(self.vocab, dtype=object),
            dim=self.dim,
            hidden=self.hidden,
            max_len=self.max_len,
            **{f"param_{k}": v for k, v in self.params.items()},
        )

    @classmethod
    def load(cls, path) -> "TinyConditionalGenerator":
        data = np.load(path, allow_pickle=True)
        model = cls(
            vocab=[str(t) for t in data["vocab"]],
            dim=int(data["dim"]),
            hidden=int(data["hidden"]),
            max_len=int(data["max_len"]),
        )
        model.params = {k[len("param_"):]: data[k] for k in data.files
                        if k.startswith("param_")}
        return model
