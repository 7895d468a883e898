"""Adam optimizer with bias correction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    """Per-parameter Adam accumulators and hyperparameters."""

    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int = 0
    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def for_params(cls, params: np.ndarray, **hyper) -> "AdamState":
        return cls(
            first_moment=np.zeros_like(params),
            second_moment=np.zeros_like(params),
            **hyper,
        )


def adam_step(params: np.ndarray, grads: np.ndarray, state: AdamState):
    """One bias-corrected Adam update.

    Returns the updated parameter array; mutates ``state`` (moments and
    step_count). Deterministic given (params, grads, state).
    """
    if params.shape != grads.shape or params.shape != state.first_moment.shape:
        raise ValueError(
            f"adam_step size mismatch: params {params.shape}, grads "
            f"{grads.shape}, state {state.first_moment.shape}"
        )
    state.step_count += 1
    t = state.step_count
    state.first_moment *= state.beta1
    state.first_moment += (1.0 - state.beta1) * grads
    state.second_moment *= state.beta2
    state.second_moment += (1.0 - state.beta2) * grads * grads
    m_hat = state.first_moment / (1.0 - state.beta1**t)
    v_hat = state.second_moment / (1.0 - state.beta2**t)
    return params - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)


@dataclass
class AdamOptimizer:
    """Adam over a list of parameter arrays (one AdamState each)."""

    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    _states: dict = field(default_factory=dict)

    def update(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        """Apply one Adam step in place to every parameter array."""
        for i, (p, g) in enumerate(zip(params, grads)):
            st = self._states.get(i)
            if st is None:
                st = AdamState.for_params(
                    p,
                    learning_rate=self.learning_rate,
                    beta1=self.beta1,
                    beta2=self.beta2,
                    epsilon=self.epsilon,
                )
                self._states[i] = st
            p[...] = adam_step(p, g, st)
