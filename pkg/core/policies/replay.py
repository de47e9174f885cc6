import numpy as np


class ReplayBuffer:
    """
    Fixed-capacity ring buffer of (state features, action, reward) rows.

    Args:
        capacity (int): Maximum number of rows; the oldest are overwritten first.
        state_dim (int): Width of the encoded state.
        action_dim (int): Width of the raw action.
    """

    def __init__(self, capacity: int, state_dim: int, action_dim: int):
        self.capacity = capacity
        self.features = np.zeros((capacity, state_dim))
        self.actions = np.zeros((capacity, action_dim))
        self.rewards = np.zeros(capacity)
        self.size = 0
        self._cursor = 0

    def __len__(self) -> int:
        return self.size

    def push(self, features: np.ndarray, actions: np.ndarray, rewards: np.ndarray) -> None:
        for row in range(len(rewards)):
            self.features[self._cursor] = features[row]
            self.actions[self._cursor] = actions[row]
            self.rewards[self._cursor] = rewards[row]
            self._cursor = (self._cursor + 1) % self.capacity
            self.size = min(self.size + 1, self.capacity)

    def reward_moments(self) -> tuple[float, float]:
        stored = self.rewards[: self.size]
        std = float(stored.std())
        return float(stored.mean()), std if std > 0 else 1.0

    def sample(
        self, batch_size: int, rng: np.random.Generator
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        index = rng.integers(0, self.size, size=batch_size)
        return self.features[index], self.actions[index], self.rewards[index]
