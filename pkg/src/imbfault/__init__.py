"""Class-imbalance learning toolkit for industrial fault diagnostics and
prognostics: windowed feature extraction, PCA/LDA reduction, synthetic
minority oversampling, boosted-tree classification, fault-event
reconstruction and imbalance-aware evaluation."""

from .core import (ClassDistribution, FaultEvent, FaultInterval, FeatureMatrix,
                   SamplerParams, TimeSeriesFrame, WindowInstance, class_distribution)
from .rng import Pcg32, seeded_rng
from .ingestion import (LabeledSeries, label_timestamps, read_feature_csv,
                        read_intervals_csv, read_timeseries_csv, write_feature_csv,
                        write_intervals_csv)
from .segmentation import segment, window_label
from .features import (FeatureConfig, Standardizer, featurize, fft_magnitude,
                       freq_stats, time_stats, wpt_decompose, wpt_stats)
from .reduction import LdaModel, PcaModel, lda_fit, lda_transform, pca_fit, pca_transform
from .imputation import GaussianModel, fit_gaussian, impute_conditional, impute_stochastic
from .sampling import (WeightedMinoritySet, agglomerative_clusters, borderline_majority,
                       emicil, ewmote, filtered_minority, information_weight,
                       informative_minority, knn, mwmote, random_oversample,
                       resample_multiclass, selection_probabilities, smote)
from .classifier import GbtModel, GbtParams, gbt_train, knn_classify, predict, predict_proba
from .metrics import (ConfusionMatrix, auc, confusion, fam, macro_metrics, mcc,
                      precision_recall_f, roc_points)
from .events import event_confusion, merge_events, windows_to_events
from .synthgen import (Scenario, fig2a_noisy_scenario, fig2b_split_cluster_scenario,
                       gaussian_blobs, synthetic_timeseries)
from .pipeline import (FoldModel, PipelineConfig, apply_transforms, fit_fold,
                       run_crossval, run_predict_events, run_resample, stratified_folds)

__version__ = "0.1.0"
