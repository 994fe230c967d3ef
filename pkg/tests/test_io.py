"""File format tests: sequence CSV, dataset manifest, model and score files.

Serialization uses shortest round-trip float representations throughout, so
every save/load pair here asserts bit equality, not approximate equality.
"""

import hashlib
import json

import numpy as np
import pytest

from gaitindex.errors import SequenceFormatError
from gaitindex.io import (
    SEQUENCE_HEADER,
    DatasetEntry,
    GaitSequence,
    load_dataset_manifest,
    load_dataset_sequences,
    load_index_outputs,
    load_model,
    load_scorer,
    load_sequence,
    save_model,
    save_scorer,
    sha256_of,
    write_dataset_manifest,
    write_index_outputs,
    write_sequence,
)
from gaitindex.scoring import IndexSeries, fuse_errors
from gaitindex.synth import SynthConfig, synth_gait


@pytest.fixture()
def sequence():
    return synth_gait(SynthConfig(seed=5, n_frames=12, noise_sigma=0.01))


# ----------------------------------------------------------------------
# sequence CSV


def test_sequence_round_trip(tmp_path, sequence):
    path = write_sequence(sequence, tmp_path / "walk.csv")
    loaded = load_sequence(path, subject_id=sequence.subject_id,
                           label=sequence.label, variant=sequence.variant)
    np.testing.assert_array_equal(loaded.joint_array(), sequence.joint_array())
    assert loaded.sequence_id == sequence.sequence_id
    assert [f.frame_index for f in loaded.frames] == list(range(12))


def test_sequence_header_has_76_columns():
    assert len(SEQUENCE_HEADER) == 1 + 75
    assert SEQUENCE_HEADER[:4] == ["frame", "j0x", "j0y", "j0z"]
    assert SEQUENCE_HEADER[-1] == "j24z"


def test_load_names_the_short_row(tmp_path):
    lines = [",".join(SEQUENCE_HEADER), "0," + ",".join(["0.0"] * 74)]
    path = tmp_path / "short.csv"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(SequenceFormatError) as exc:
        load_sequence(path)
    assert exc.value.line == 2
    assert "75" in str(exc.value)  # 74 coordinates + frame column


def test_load_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n0,1,2\n")
    with pytest.raises(SequenceFormatError) as exc:
        load_sequence(path)
    assert exc.value.line == 1


def test_load_rejects_empty_and_headerless_files(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(SequenceFormatError, match="empty"):
        load_sequence(empty)
    header_only = tmp_path / "header.csv"
    header_only.write_text(",".join(SEQUENCE_HEADER) + "\n")
    with pytest.raises(SequenceFormatError, match="no frames"):
        load_sequence(header_only)


def test_load_rejects_gapped_frame_numbers(tmp_path):
    row = ",".join(["0.0"] * 75)
    path = tmp_path / "gap.csv"
    path.write_text(
        ",".join(SEQUENCE_HEADER) + f"\n0,{row}\n2,{row}\n"
    )
    with pytest.raises(SequenceFormatError, match="consecutive") as exc:
        load_sequence(path)
    assert exc.value.line == 3


def test_load_rejects_nonfinite_coordinates(tmp_path):
    row = ["0.0"] * 75
    row[10] = "inf"
    path = tmp_path / "inf.csv"
    path.write_text(",".join(SEQUENCE_HEADER) + "\n0," + ",".join(row) + "\n")
    with pytest.raises(SequenceFormatError, match="non-finite"):
        load_sequence(path)


def test_load_defaults_subject_to_the_file_stem(tmp_path, sequence):
    path = write_sequence(sequence, tmp_path / "subject-9.csv")
    loaded = load_sequence(path)
    assert loaded.subject_id == "subject-9"
    assert loaded.label == "normal"


def test_sequence_invariants():
    frames = synth_gait(SynthConfig(n_frames=3)).frames
    with pytest.raises(ValueError):
        GaitSequence(subject_id="s", label="normal", frames=[])
    with pytest.raises(ValueError):
        GaitSequence(subject_id="s", label="normal", frames=[frames[0], frames[2]])


# ----------------------------------------------------------------------
# dataset manifest


def test_dataset_manifest_round_trip(tmp_path, sequence):
    write_sequence(sequence, tmp_path / "s1_normal.csv")
    write_sequence(sequence, tmp_path / "s2_sole_pad-10.csv")
    entries = [
        DatasetEntry("s1_normal.csv", "s1", "normal", "", "train"),
        DatasetEntry("s2_sole_pad-10.csv", "s2", "abnormal", "sole_pad:10", "test"),
    ]
    path = write_dataset_manifest(entries, tmp_path / "dataset.json", seed=7)
    assert load_dataset_manifest(path) == entries

    train = load_dataset_sequences(path, role="train")
    assert [s.subject_id for s in train] == ["s1"]
    everything = load_dataset_sequences(path)
    assert {s.sequence_id for s in everything} == {"s1_normal", "s2_sole_pad:10"}


def test_dataset_manifest_rejects_other_kinds(tmp_path):
    path = tmp_path / "other.json"
    path.write_text(json.dumps({"kind": "something-else", "sequences": []}))
    with pytest.raises(ValueError, match="dataset manifest"):
        load_dataset_manifest(path)


# ----------------------------------------------------------------------
# model files


def test_model_round_trip_is_bit_faithful(tmp_path, fitted_scorer, posture_batch):
    model = fitted_scorer.models_[1]
    path = save_model(model, tmp_path / "model_y.json",
                      component_names=("a",) * 17)
    loaded = load_model(path)
    for W, Wl in zip(model.weights_, loaded.weights_):
        np.testing.assert_array_equal(W, Wl)
    for b, bl in zip(model.biases_, loaded.biases_):
        np.testing.assert_array_equal(b, bl)
    assert loaded.train_mse_ == model.train_mse_
    assert loaded.axis_tag == "Y"
    assert loaded.train_config == model.train_config
    X = posture_batch[:, 1, :]
    np.testing.assert_array_equal(
        loaded.reconstruction_errors(X), model.reconstruction_errors(X)
    )


def test_model_save_requires_a_fitted_model(tmp_path):
    from gaitindex.autoencoder import SparseAutoencoder

    with pytest.raises(ValueError, match="fitted"):
        save_model(SparseAutoencoder(), tmp_path / "nope.json")


def test_model_load_rejects_newer_versions_and_tampered_dims(tmp_path, fitted_scorer):
    model = fitted_scorer.models_[0]
    path = save_model(model, tmp_path / "model.json")

    payload = json.loads(path.read_text())
    payload["format_version"] = 99
    newer = tmp_path / "newer.json"
    newer.write_text(json.dumps(payload))
    with pytest.raises(ValueError, match="newer"):
        load_model(newer)

    payload = json.loads(path.read_text())
    payload["topology"]["dims"][1] = 999
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(payload))
    with pytest.raises(ValueError, match="declared dims"):
        load_model(tampered)

    payload = json.loads(path.read_text())
    payload["kind"] = "gaitindex-dataset"
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps(payload))
    with pytest.raises(ValueError, match="axis-model"):
        load_model(wrong)


def test_scorer_bundle_round_trip(tmp_path, fitted_scorer, posture_batch):
    bundle = save_scorer(fitted_scorer, tmp_path / "models")
    assert bundle.name == "scorer.json"
    for name in ("model_x.json", "model_y.json", "model_z.json"):
        assert (tmp_path / "models" / name).exists()

    loaded = load_scorer(bundle)
    assert loaded.weights_ == fitted_scorer.weights_
    assert loaded.train_errors_ == fitted_scorer.train_errors_
    np.testing.assert_array_equal(
        loaded.score_frames(posture_batch), fitted_scorer.score_frames(posture_batch)
    )
    # the directory form resolves to the same bundle
    also = load_scorer(tmp_path / "models")
    assert also.weights_ == loaded.weights_


def test_scorer_bundle_rejects_tampered_weights(tmp_path, fitted_scorer):
    bundle = save_scorer(fitted_scorer, tmp_path / "models")
    payload = json.loads(bundle.read_text())
    payload["fusion_weights"]["X"] *= 1.5
    bundle.write_text(json.dumps(payload))
    with pytest.raises(ValueError, match="disagree"):
        load_scorer(bundle)


# ----------------------------------------------------------------------
# index outputs


def test_index_outputs_round_trip(tmp_path, rng):
    errors = rng.uniform(0.0, 0.2, size=(45, 3))
    weights = (2.0, 3.0, 6.0)
    series = {
        mode: IndexSeries(
            per_frame=fuse_errors(errors, weights, mode=mode), segment_length=20
        )
        for mode in ("unweighted", "weighted")
    }
    csv_path, json_path = write_index_outputs(
        series, errors, weights, "subj_none", tmp_path, first_frame=3
    )
    assert csv_path.name == "subj_none.csv"

    rows = csv_path.read_text().splitlines()
    assert rows[0] == "frame,index"
    assert len(rows) == 1 + 45
    assert rows[0 + 1].split(",")[0] == "3"
    # the CSV column reproduces the weighted index bit for bit
    values = np.array([float(r.split(",")[1]) for r in rows[1:]])
    np.testing.assert_array_equal(values, series["weighted"].per_frame)

    payload = load_index_outputs(json_path)
    assert payload["kind"] == "gaitindex-scores"
    assert payload["sequence_id"] == "subj_none"
    assert payload["segment_length"] == 20
    np.testing.assert_array_equal(payload["axis_errors"]["Z"], errors[:, 2])
    for mode in ("unweighted", "weighted"):
        np.testing.assert_array_equal(
            payload["per_frame"][mode], series[mode].per_frame
        )
        np.testing.assert_array_equal(
            payload["per_segment"][mode], series[mode].per_segment
        )
        assert payload["per_sequence"][mode] == series[mode].per_sequence


def test_load_index_outputs_rejects_other_payloads(tmp_path):
    path = tmp_path / "x.json"
    path.write_text(json.dumps({"kind": "gaitindex-axis-model"}))
    with pytest.raises(ValueError, match="score file"):
        load_index_outputs(path)


def test_sha256_of_matches_hashlib(tmp_path):
    path = tmp_path / "blob.bin"
    path.write_bytes(b"abnormality index")
    assert sha256_of(path) == hashlib.sha256(b"abnormality index").hexdigest()
