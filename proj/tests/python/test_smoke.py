# Copyright (c) 2026 The ExPO-desk Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import pytest

import expo


def small_corpus(seed=1):
    cfg = expo.CorpusConfig()
    cfg.n_speakers = 6
    cfg.utts_per_speaker = 6
    cfg.seed = seed
    return expo.generate_corpus(cfg)


def test_eer_hand_case():
    eer, _ = expo.compute_eer([0.9, 0.7, 0.3, 0.6, 0.2, 0.1],
                              [True, True, True, False, False, False])
    assert eer == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert expo.compute_min_dcf([0.9, 0.1], [True, False]) == 0.0


def test_single_class_raises_config_error():
    with pytest.raises(expo.ConfigError):
        expo.compute_eer([0.1, 0.2], [True, True])
    assert issubclass(expo.ConfigError, expo.Error)
    assert issubclass(expo.DivergenceError, expo.NumericError)


def test_evidence_score():
    assert expo.evidence_score([None, 0.958, 0.959, None, 0.973]) == \
        pytest.approx(0.9633333333333334, abs=1e-12)
    with pytest.raises(expo.UndefinedEvidenceError):
        expo.evidence_score([None, None])


def test_corpus_split_and_trials():
    corpus = small_corpus()
    assert len(corpus) == 36
    assert len(corpus.speaker_ids()) == 6
    train, held = corpus.split_per_speaker(4)
    assert len(train) == 24 and len(held) == 12
    trials = expo.make_trials(held, 10, 10, 3)
    assert trials.n_target() == 10 and trials.n_nontarget() == 10


def test_train_score_and_analyse(tmp_path):
    train, held = small_corpus().split_per_speaker(4)
    cfg = expo.TrainConfig()
    cfg.epochs = 3
    cfg.speakers_per_batch = 3
    result = expo.train(train, cfg)
    assert all(math.isfinite(x) for x in result.step_losses)
    ckpt = str(tmp_path / "ckpt")
    expo.save_checkpoint(ckpt, result.model)
    model = expo.load_checkpoint(ckpt)
    trials = expo.make_trials(held, 40, 40, 5)
    records = expo.score_trials(model, held, trials)
    assert records == expo.score_trials(result.model, held, trials)
    assert all(-1.0 <= r.final_score <= 1.0 for r in records)
    assert len(records[0].similarity) == len(held.inventory)
    report = expo.f_ratio(records, held.inventory, n_samples=5, seed=2)
    assert report.to_csv().startswith("phone,within,between,ratio,included\n")
    assert "phone\t" in expo.export_explanation(records[0], held.inventory)


def test_missing_checkpoint_raises_io_error(tmp_path):
    with pytest.raises(expo.IoError):
        expo.load_checkpoint(str(tmp_path / "nope"))
