"""Speech activity detection toolkit with a GMM-UBM evaluation harness."""

from .audio import (
    FrameSequence,
    FramingSpec,
    Waveform,
    avg_magnitude_spectrum,
    frame_energy,
    frame_signal,
    read_wav,
    write_wav,
    zero_crossing_rate,
)
from .features import (
    FeatureMatrix,
    MfccConfig,
    MfccExtractor,
    append_deltas,
    cmvn,
    extract_mfcc,
    load_features,
    mel_filterbank,
    mel_scale,
    preemphasize,
    save_features,
)
from .gmm import (
    DiagonalGmm,
    em_train,
    load_gmm,
    map_adapt,
    save_gmm,
    split_vq_init,
    top_c_llr,
    top_c_llr_many,
)
from .metrics import (
    DcfParams,
    TrialScore,
    det_points,
    eer,
    load_scores,
    min_dcf,
    save_scores,
    tnorm,
)
from .noise import (
    DistortionPolicy,
    MixRecord,
    NoiseMixSpec,
    distort_corpus,
    mix_at_offset,
    mix_noise,
    replay_mix,
)
from .sad import (
    AllSpeechDetector,
    AverageEnergyDetector,
    BiGaussianDetector,
    BiGaussianModel,
    G729BDetector,
    MaxEnergyDetector,
    SohnDetector,
    SpeechMask,
    apply_mask,
    fit_bigaussian,
    load_masks,
    make_detector,
    save_masks,
)

__version__ = "0.1.0"
