"""Temporal quality: the eleven sub-metrics of the temporal dimension."""

from .actions import SMOOTHNESS_QUESTIONS, human_action_score, occurrence_question
from .events import (
    EventClip,
    SubjectTrack,
    TrackSet,
    ground_event_clips,
    inter_event_consistency,
    intra_event_consistency,
    segment_tracks,
    subject_labels,
    uniform_partition,
)
from .motion import dynamic_degree, motion_smoothness, semantic_consistency, temporal_flickering, warping_error
from .transitions import (
    TransitionParams,
    TransitionWindow,
    detect_transitions,
    smoothness_from_sequence,
    transition_similarity_sequence,
    transition_smoothness,
    window_normalize,
)

__all__ = [
    "EventClip",
    "SMOOTHNESS_QUESTIONS",
    "SubjectTrack",
    "TrackSet",
    "TransitionParams",
    "TransitionWindow",
    "detect_transitions",
    "dynamic_degree",
    "ground_event_clips",
    "human_action_score",
    "inter_event_consistency",
    "intra_event_consistency",
    "motion_smoothness",
    "occurrence_question",
    "segment_tracks",
    "semantic_consistency",
    "smoothness_from_sequence",
    "subject_labels",
    "temporal_flickering",
    "transition_similarity_sequence",
    "transition_smoothness",
    "uniform_partition",
    "warping_error",
    "window_normalize",
]
