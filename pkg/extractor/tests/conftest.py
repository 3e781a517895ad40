import dataclasses

import numpy as np
import pytest
import torch
from scipy.ndimage import shift as nd_shift
from scipy.ndimage import zoom
from sklearn.datasets import load_digits

from hullfeed import formats

SEED = 77
N_BASES = 100  # training renders drawn from a small dense pool of scans
N_TRAIN = 800
N_TEST = 250
EPOCHS = 12


class _Net(torch.nn.Module):
    """784 -> 128 -> 32 -> 10 MLP returning (penultimate, logits)."""

    def __init__(self):
        super().__init__()
        self.fc1 = torch.nn.Linear(784, 128)
        self.fc2 = torch.nn.Linear(128, 32)
        self.out = torch.nn.Linear(32, 10)

    def forward(self, x):
        h = torch.relu(self.fc1(x))
        f = torch.relu(self.fc2(h))
        return f, self.out(f)


def _render(base, src, rng):
    img = zoom(base[src], 28 / 8, order=1, mode="nearest")
    dx, dy = rng.integers(-2, 3, size=2)
    img = nd_shift(img, (dy, dx), order=1, mode="constant", cval=0.0)
    img = img + rng.normal(0.0, 0.01, size=img.shape)
    return np.clip(img, 0.0, 1.0).ravel()


def _make_dataset():
    digits = load_digits()
    base = digits.images / 16.0
    pool_rng = np.random.default_rng(SEED)
    perm = pool_rng.permutation(base.shape[0])
    train_pool, test_pool = perm[:N_BASES], perm[1400:]
    rng = np.random.default_rng(SEED + 1)
    tr_src = train_pool[rng.integers(0, train_pool.size, size=N_TRAIN)]
    te_src = test_pool[rng.integers(0, test_pool.size, size=N_TEST)]
    x_train = np.stack([_render(base, s, rng) for s in tr_src]).astype(np.float32)
    x_test = np.stack([_render(base, s, rng) for s in te_src]).astype(np.float32)
    return (x_train, digits.target[tr_src].astype(np.int64),
            x_test, digits.target[te_src].astype(np.int64))


def _train_model(x_train, y_train):
    torch.manual_seed(SEED)
    net = _Net()
    opt = torch.optim.Adam(net.parameters(), lr=1e-3)
    x = torch.from_numpy(x_train)
    y = torch.from_numpy(y_train)
    for _ in range(EPOCHS):
        order = torch.randperm(x.shape[0])
        for lo in range(0, x.shape[0], 128):
            idx = order[lo:lo + 128]
            opt.zero_grad()
            _, logits = net(x[idx])
            loss = torch.nn.functional.cross_entropy(logits, y[idx])
            loss.backward()
            opt.step()
    net.eval()
    return net


@dataclasses.dataclass(frozen=True)
class Workspace:
    root: str
    model_path: str
    train_images: str
    train_labels: str
    test_images: str
    test_labels: str
    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray


@pytest.fixture(scope="session")
def workspace(tmp_path_factory) -> Workspace:
    root = tmp_path_factory.mktemp("hullfeed")
    x_train, y_train, x_test, y_test = _make_dataset()
    net = _train_model(x_train, y_train)
    model_path = str(root / "model.pt")
    torch.jit.script(net).save(model_path)

    paths = {
        "train_images": str(root / "train_images.fvec"),
        "train_labels": str(root / "train_labels.lvec"),
        "test_images": str(root / "test_images.fvec"),
        "test_labels": str(root / "test_labels.lvec"),
    }
    formats.write_fvec(paths["train_images"], x_train)
    formats.write_lvec(paths["train_labels"], y_train)
    formats.write_fvec(paths["test_images"], x_test)
    formats.write_lvec(paths["test_labels"], y_test)
    return Workspace(root=str(root), model_path=model_path,
                     x_train=x_train, y_train=y_train,
                     x_test=x_test, y_test=y_test, **paths)
