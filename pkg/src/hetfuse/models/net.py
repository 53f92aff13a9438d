"""
Multi-head tanh network trained by full-batch gradient descent on weighted MSE.

With ``shared_rep`` the network has one shared trunk and two linear heads
(control = 0, treated = 1); every training sample is routed through the head given
in ``heads``. Without it there is a single head. Inputs and targets are standardized
internally and the scalers travel with the fitted parameters, so a warm start
continues in the same coordinates.
"""

from dataclasses import dataclass, replace

import numpy as np

from hetfuse.exceptions import ModelError
from hetfuse.models.base import FittedModel
from hetfuse.models.spec import NetParams
from hetfuse.seeding import make_rng

# Parameters are a flat list: [W_1, b_1, ..., W_L, b_L, W_out, b_out].
Params = list[np.ndarray]


@dataclass(frozen=True, eq=False)
class NetModel(FittedModel):
    params: tuple[np.ndarray, ...]
    x_mean: np.ndarray
    x_scale: np.ndarray
    y_mean: float
    y_scale: float
    p: int
    head: int = 0
    kind: str = "net"

    @property
    def n_heads(self) -> int:
        return self.params[-1].shape[0]

    @property
    def hidden_widths(self) -> tuple[int, ...]:
        return tuple(W.shape[1] for W in self.params[:-2:2])

    def select_head(self, head: int) -> "NetModel":
        """Same network, predicting through ``head``."""
        if not 0 <= head < self.n_heads:
            raise ModelError(f"head {head} out of range for {self.n_heads} heads")
        return replace(self, head=head)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        Z = (X - self.x_mean) / self.x_scale
        heads = np.full(X.shape[0], self.head, dtype=np.intp)
        out, _ = forward(list(self.params), Z, heads)
        return self.y_mean + self.y_scale * out


def init_params(
    p: int, hidden_widths: tuple[int, ...], n_heads: int, rng: np.random.Generator
) -> Params:
    """Scaled-normal weights (variance 1 / fan_in) and zero biases."""
    params: Params = []
    fan_in = p
    for width in (*hidden_widths, n_heads):
        params.append(rng.normal(0.0, 1.0 / np.sqrt(max(fan_in, 1)), size=(fan_in, width)))
        params.append(np.zeros(width))
        fan_in = width
    return params


def forward(
    params: Params, Z: np.ndarray, heads: np.ndarray
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Network output per row (through that row's head) and the hidden activations."""
    activations = [Z]
    A = Z
    for W, b in zip(params[:-2:2], params[1:-2:2], strict=True):
        A = np.tanh(A @ W + b)
        activations.append(A)
    W_out, b_out = params[-2], params[-1]
    rows = np.arange(A.shape[0])
    out = (A @ W_out + b_out)[rows, heads]
    return out, activations


def loss_and_grad(
    params: Params,
    Z: np.ndarray,
    target: np.ndarray,
    weights: np.ndarray,
    heads: np.ndarray,
) -> tuple[float, Params]:
    """
    Weighted mean squared error ``mean(w * (f(Z) - target)^2)`` and its exact
    gradient with respect to every parameter array.
    """
    n = Z.shape[0]
    out, activations = forward(params, Z, heads)
    residual = out - target
    loss = float(np.mean(weights * residual**2))

    d_out = 2.0 * weights * residual / n
    # Only the row's own head receives gradient.
    d_logits = np.zeros((n, params[-1].shape[0]))
    d_logits[np.arange(n), heads] = d_out

    grads: Params = [np.empty(0)] * len(params)
    A_last = activations[-1]
    grads[-2] = A_last.T @ d_logits
    grads[-1] = d_logits.sum(axis=0)
    dA = d_logits @ params[-2].T

    n_hidden = (len(params) - 2) // 2
    for layer in reversed(range(n_hidden)):
        A = activations[layer + 1]
        dpre = dA * (1.0 - A * A)
        grads[2 * layer] = activations[layer].T @ dpre
        grads[2 * layer + 1] = dpre.sum(axis=0)
        dA = dpre @ params[2 * layer].T
    return loss, grads


def _scaler(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = values.mean(axis=0)
    scale = values.std(axis=0)
    scale = np.where(scale > 0.0, scale, 1.0)
    return mean, scale


def _is_degenerate(X: np.ndarray) -> bool:
    return X.shape[0] < 2 or bool(np.all(np.ptp(X, axis=0) == 0.0))


def fit_net(
    params: NetParams,
    X: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray,
    seed: int,
    warm_start: NetModel | None = None,
    heads: np.ndarray | None = None,
) -> NetModel:
    """
    Run ``params.epochs`` full-batch gradient-descent steps with a fixed step size.

    Parameters and scalers start from ``warm_start`` when given (its architecture must
    match), otherwise from a seeded initialization with scalers fit to this data.
    Degenerate inputs (one sample, or constant covariates) give a constant predictor
    per head equal to that head's weighted mean target.
    """
    n, p = X.shape
    n_heads = 2 if params.shared_rep else 1
    if heads is None or n_heads == 1:
        heads = np.zeros(n, dtype=np.intp)
    heads = np.asarray(heads, dtype=np.intp)
    if len(heads) != n or np.any((heads < 0) | (heads >= n_heads)):
        raise ModelError(f"heads must hold {n} entries in [0, {n_heads})")

    if warm_start is not None:
        if warm_start.n_heads != n_heads or warm_start.hidden_widths != tuple(
            params.hidden_widths
        ):
            raise ModelError("warm start network has a different architecture")
        theta = [w.copy() for w in warm_start.params]
        x_mean, x_scale = warm_start.x_mean, warm_start.x_scale
        y_mean, y_scale = warm_start.y_mean, warm_start.y_scale
    else:
        theta = init_params(p, tuple(params.hidden_widths), n_heads, make_rng(seed))
        x_mean, x_scale = _scaler(X)
        y_mean_arr, y_scale_arr = _scaler(y.reshape(-1, 1))
        y_mean, y_scale = float(y_mean_arr[0]), float(y_scale_arr[0])

    Z = (X - x_mean) / x_scale
    target = (y - y_mean) / y_scale

    if _is_degenerate(X):
        theta[-2] = np.zeros_like(theta[-2])
        for head in range(n_heads):
            rows = heads == head
            if rows.any() and weights[rows].sum() > 0:
                theta[-1][head] = weights[rows] @ target[rows] / weights[rows].sum()
    else:
        for _ in range(params.epochs):
            _, grads = loss_and_grad(theta, Z, target, weights, heads)
            for value, grad in zip(theta, grads, strict=True):
                value -= params.step_size * grad

    for value in theta:
        value.setflags(write=False)
    return NetModel(
        params=tuple(theta),
        x_mean=x_mean,
        x_scale=x_scale,
        y_mean=y_mean,
        y_scale=y_scale,
        p=p,
        head=warm_start.head if warm_start is not None else 0,
    )


def copy_net(model: NetModel) -> NetModel:
    """Deep copy whose arrays are independent of ``model``'s."""
    return replace(
        model,
        params=tuple(w.copy() for w in model.params),
        x_mean=model.x_mean.copy(),
        x_scale=model.x_scale.copy(),
    )
