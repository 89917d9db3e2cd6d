"""phonaug: selective phonation augmentation for phonetic transcription corpora.

Aligns timestamped phone predictions from a reference model and a helper
model, selectively overwrites phonation (voicing/aspiration/breathiness) to
produce augmented training transcriptions, and evaluates plosive realizations
with VOT-grounded metrics.
"""

from .augment import (
    AugmentationStats, MappingTable, MatchPair, augment_corpus, augment_track,
    match_phones, prefilter_by_aspiration,
)
from .ctc import FramePath, PhoneTrack, TimedPhone, decode_track, greedy_collapse
from .errors import PhonaugError
from .inventory import (
    ASPIRATED, BREATHY_VOICED, TENUIS, VOICED, Inventory, Phonation, Phone,
    PhoneFeatures, normalize_g, phonation_of, serialize, tokenize_ipa, with_phonation,
)
from .manifest import (
    SegmentRecord, VocabSpec, build_onset_testset, clean_vocab, filter_downvoted,
    remap_invalid, sample_segments, split_validation,
)
from .metrics import (
    ClassifierConfig, Classified, EvalInstance, MetricsReport, Realization,
    asp_pct, classify_all, classify_prediction, mcnemar_exact, null_pct,
    relative_change, report, ten_pct, voicing_acc,
)
from .synth import ScenarioSpec, generate

__version__ = "0.1.0"
