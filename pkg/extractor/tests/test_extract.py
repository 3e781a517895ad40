import json
import os
import subprocess
import sys

import numpy as np
import pytest
import torch

import hullcert.formats as primary_formats
from hullfeed import (DataError, ManifestError, PerturbationError, formats,
                      load_manifest, load_model, run)
from hullfeed.cli import run_cli
from hullfeed.extract import fgsm_perturb


def _write_manifest(path, body):
    with open(path, "w") as f:
        json.dump(body, f)
    return str(path)


def _manifest(workspace, tmp_path, layer, outputs, model=True,
              perturbation=None, images=None, labels=None, seed=3):
    body = {
        "images": images or workspace.test_images,
        "labels": labels or workspace.test_labels,
        "layer": layer,
        "outputs": {k: str(tmp_path / v) for k, v in outputs.items()},
        "seed": seed,
    }
    if model:
        body["model"] = workspace.model_path
    if perturbation is not None:
        body["perturbation"] = perturbation
    return _write_manifest(tmp_path / "manifest.json", body)


class TestManifest:
    def test_missing_key_rejected(self, tmp_path):
        path = _write_manifest(tmp_path / "m.json", {"images": "x.fvec"})
        with pytest.raises(ManifestError):
            load_manifest(path)

    def test_negative_fgsm_step_rejected(self, workspace, tmp_path):
        path = _manifest(workspace, tmp_path, "pixel", {"features": "f.fvec"},
                         perturbation={"kind": "fgsm", "step": -0.1})
        with pytest.raises(PerturbationError):
            load_manifest(path)

    def test_model_required_for_predictions(self, workspace, tmp_path):
        path = _manifest(workspace, tmp_path, "pixel",
                         {"features": "f.fvec", "predictions": "p.lvec"},
                         model=False)
        with pytest.raises(ManifestError):
            load_manifest(path)

    def test_relative_paths_resolve_against_manifest_dir(self, workspace,
                                                         tmp_path):
        body = {"images": os.path.basename(workspace.test_images),
                "labels": "labels.lvec", "layer": "pixel",
                "outputs": {"features": "f.fvec"}}
        path = _write_manifest(tmp_path / "m.json", body)
        man = load_manifest(path)
        assert man.images == str(tmp_path / os.path.basename(
            workspace.test_images))
        assert man.outputs["features"] == str(tmp_path / "f.fvec")


class TestPixelMode:
    def test_four_image_shape(self, workspace, tmp_path):
        formats.write_fvec(tmp_path / "four.fvec", workspace.x_test[:4])
        formats.write_lvec(tmp_path / "four.lvec", workspace.y_test[:4])
        path = _manifest(workspace, tmp_path, "pixel",
                         {"features": "f.fvec"}, model=False,
                         images=str(tmp_path / "four.fvec"),
                         labels=str(tmp_path / "four.lvec"))
        run(load_manifest(path))
        out = primary_formats.read_fvec(tmp_path / "f.fvec")
        assert out.shape == (4, 784)

    def test_pixel_passthrough_is_bitwise(self, workspace, tmp_path):
        path = _manifest(workspace, tmp_path, "pixel",
                         {"features": "f.fvec"}, model=False)
        run(load_manifest(path))
        out = formats.read_fvec(tmp_path / "f.fvec")
        assert out.tobytes() == workspace.x_test.tobytes()


class TestExtraction:
    OUTPUTS = {"features": "features.fvec", "softmax": "softmax.fvec",
               "labels": "labels.lvec", "predictions": "predictions.lvec",
               "correctness": "correctness.lvec", "pixels": "pixels.fvec"}

    def test_round_trip_primary_readers(self, workspace, tmp_path):
        path = _manifest(workspace, tmp_path, "penultimate", self.OUTPUTS)
        written = run(load_manifest(path))
        assert set(written) == set(self.OUTPUTS)
        n = workspace.x_test.shape[0]
        for key in ("features", "softmax", "pixels"):
            assert primary_formats.read_fvec(written[key]).shape[0] == n
        for key in ("labels", "predictions", "correctness"):
            assert primary_formats.read_lvec(written[key]).shape == (n,)

    def test_softmax_rows_sum_to_one(self, workspace, tmp_path):
        path = _manifest(workspace, tmp_path, "softmax",
                         {"softmax": "s.fvec"})
        run(load_manifest(path))
        probs = primary_formats.read_fvec(tmp_path / "s.fvec")
        assert probs.min() >= 0.0
        np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-6)

    def test_correctness_mean_is_accuracy(self, workspace, tmp_path):
        path = _manifest(workspace, tmp_path, "penultimate",
                         {"predictions": "p.lvec", "correctness": "c.lvec"})
        run(load_manifest(path))
        pred = primary_formats.read_lvec(tmp_path / "p.lvec")
        correct = primary_formats.read_lvec(tmp_path / "c.lvec")
        accuracy = float((pred == workspace.y_test).mean())
        assert correct.mean() == pytest.approx(accuracy, abs=1e-6)
        assert set(np.unique(correct)) <= {0, 1}

    def test_deterministic_given_manifest(self, workspace, tmp_path):
        blobs = []
        for rerun in range(2):
            out = tmp_path / f"run{rerun}"
            out.mkdir()
            path = _manifest(workspace, out, "penultimate", self.OUTPUTS,
                             perturbation={"kind": "fgsm", "step": 0.05})
            written = run(load_manifest(path))
            blobs.append({k: open(v, "rb").read()
                          for k, v in written.items()})
        assert blobs[0] == blobs[1]

    def test_label_count_mismatch_rejected(self, workspace, tmp_path):
        formats.write_lvec(tmp_path / "short.lvec", workspace.y_test[:-1])
        path = _manifest(workspace, tmp_path, "penultimate",
                         {"features": "f.fvec"},
                         labels=str(tmp_path / "short.lvec"))
        with pytest.raises(DataError):
            run(load_manifest(path))


class TestFgsm:
    def test_eta_zero_is_bitwise_identity(self, workspace, tmp_path):
        path = _manifest(workspace, tmp_path, "pixel", {"pixels": "p.fvec"},
                         perturbation={"kind": "fgsm", "step": 0.0})
        run(load_manifest(path))
        out = formats.read_fvec(tmp_path / "p.fvec")
        assert out.tobytes() == workspace.x_test.tobytes()

    def test_linf_bound_and_value_range(self, workspace, tmp_path):
        eta = 0.05
        path = _manifest(workspace, tmp_path, "pixel", {"pixels": "p.fvec"},
                         perturbation={"kind": "fgsm", "step": eta})
        run(load_manifest(path))
        adv = formats.read_fvec(tmp_path / "p.fvec")
        delta = np.abs(adv - workspace.x_test)
        assert delta.max() <= eta + 1e-7
        assert adv.min() >= 0.0 and adv.max() <= 1.0
        assert delta.max() > 0.0  # the attack actually moved something

    def test_accuracy_drops_under_attack(self, workspace, tmp_path):
        model = load_model(workspace.model_path)
        x = torch.from_numpy(workspace.x_test)
        y = torch.from_numpy(workspace.y_test)
        with torch.no_grad():
            _, clean_logits = model(x)
        adv = fgsm_perturb(model, x, y, 0.1, batch_size=128)
        with torch.no_grad():
            _, adv_logits = model(adv)
        acc_clean = float((clean_logits.argmax(1) == y).float().mean())
        acc_adv = float((adv_logits.argmax(1) == y).float().mean())
        assert acc_adv <= acc_clean


class TestCli:
    def test_usage_error_exit_1(self, capsys):
        assert run_cli([]) == 1

    def test_missing_manifest_exit_2(self, capsys):
        assert run_cli(["run", "/nonexistent/manifest.json"]) == 2

    def test_run_prints_written_paths(self, workspace, tmp_path, capsys):
        path = _manifest(workspace, tmp_path, "pixel",
                         {"features": "f.fvec"}, model=False)
        assert run_cli(["run", path]) == 0
        out = capsys.readouterr().out
        assert str(tmp_path / "f.fvec") in out


class TestTableIiiDirection:
    def _summary_cr(self, train_fvec, test_fvec, tmp_path, tag):
        hull = str(tmp_path / f"{tag}.hul")
        subprocess.run(["hullcert", "build", "--train", train_fvec,
                        "--out", hull], check=True, capture_output=True)
        proc = subprocess.run(["hullcert", "summary", "--hull", hull,
                               "--test", test_fvec],
                              check=True, capture_output=True, text=True)
        return json.loads(proc.stdout)["payload"]["closure_ratio"]

    def test_feature_cr_exceeds_pixel_cr(self, workspace, tmp_path):
        """Feature-level CR beats pixel-level CR on the same samples."""
        for split, images, labels in (
                ("train", workspace.train_images, workspace.train_labels),
                ("test", workspace.test_images, workspace.test_labels)):
            path = _manifest(workspace, tmp_path, "penultimate",
                             {"features": f"{split}_feat.fvec"},
                             images=images, labels=labels)
            run(load_manifest(path))
        feature_cr = self._summary_cr(str(tmp_path / "train_feat.fvec"),
                                      str(tmp_path / "test_feat.fvec"),
                                      tmp_path, "feature")
        pixel_cr = self._summary_cr(workspace.train_images,
                                    workspace.test_images,
                                    tmp_path, "pixel")
        assert feature_cr > pixel_cr
