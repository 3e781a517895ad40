"""Generate the bundled 28x28 digit-pixel fixtures (CSV, committed).

Environment has no dataset downloads, so the fixture is synthesized from
scikit-learn's bundled 8x8 handwritten digit scans: each image is upscaled
to 28x28, randomly shifted by up to 2 pixels, and lightly noised, with
fixed seeds so regeneration is byte-identical. Values are intensities in
[0, 1], flattened row-major to 784 columns: 2000 training rows and 500
test rows.

The 2000 training rows are drawn (with repetition) from a small pool of
150 base scans so the training set is dense the way a large in-domain
training corpus is: repeated shifted renders of the same scan sit close
together (keeping the neighbor margin small) while interpolating each
other under the hull. The 500 test rows come from a disjoint pool of base
scans, mirroring the different-writers split of real train/test image
sets, so most test rows land outside the training hull.
"""

import os

import numpy as np
from scipy.ndimage import shift as nd_shift
from scipy.ndimage import zoom
from sklearn.datasets import load_digits

SEED = 20260826
N_BASES = 150
N_TRAIN = 2000
N_TEST = 500
NOISE = 0.01
OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")


def render(base, src, rng):
    img = zoom(base[src], 28 / 8, order=1, mode="nearest")
    dx, dy = rng.integers(-2, 3, size=2)
    img = nd_shift(img, (dy, dx), order=1, mode="constant", cval=0.0)
    img = img + rng.normal(0.0, NOISE, size=img.shape)
    return np.clip(img, 0.0, 1.0).ravel()


def make_images():
    pool_rng = np.random.default_rng(SEED)
    base = load_digits().images / 16.0  # (1797, 8, 8) in [0, 1]
    perm = pool_rng.permutation(base.shape[0])
    train_pool, test_pool = perm[:N_BASES], perm[1400:]
    rng = np.random.default_rng(SEED + N_BASES)
    train_idx = train_pool[rng.integers(0, train_pool.size, size=N_TRAIN)]
    train = np.stack([render(base, s, rng) for s in train_idx])
    test_idx = test_pool[rng.integers(0, test_pool.size, size=N_TEST)]
    test = np.stack([render(base, s, rng) for s in test_idx])
    return train, test


def write_csv(path, rows):
    with open(path, "w") as f:
        for row in rows:
            f.write(",".join(f"{v:.4f}" for v in row) + "\n")


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    train, test = make_images()
    write_csv(os.path.join(OUT_DIR, "digits_pixels_train.csv"), train)
    write_csv(os.path.join(OUT_DIR, "digits_pixels_test.csv"), test)
    print(f"wrote {N_TRAIN}+{N_TEST} rows to {os.path.abspath(OUT_DIR)}")


if __name__ == "__main__":
    main()
