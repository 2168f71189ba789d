//! Stochastic stand-in for the vision front-end.
//!
//! A scripted gesture sequence is rendered to per-frame labels, corrupted by
//! a confusion matrix plus frame dropout, and debounced back into discrete
//! gesture events.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{GestureToken, ALPHABET_SIZE};

/// Every gesture token plus `NO_HAND`.
pub const LABEL_COUNT: usize = ALPHABET_SIZE + 1;

const ROW_SUM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrameLabel {
    Hand(GestureToken),
    NoHand,
}

impl FrameLabel {
    /// Row/column of this label in a confusion matrix; `NO_HAND` is last.
    pub fn index(self) -> usize {
        match self {
            FrameLabel::Hand(t) => t.index(),
            FrameLabel::NoHand => ALPHABET_SIZE,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        if i == ALPHABET_SIZE {
            Some(FrameLabel::NoHand)
        } else {
            GestureToken::from_index(i).map(FrameLabel::Hand)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameObservation {
    pub label: FrameLabel,
    pub confidence: f64,
}

impl FrameObservation {
    pub fn hand(token: GestureToken, confidence: f64) -> Self {
        Self {
            label: FrameLabel::Hand(token),
            confidence: confidence.clamp(0.0, 1.0),
        }
    }

    pub fn no_hand() -> Self {
        Self {
            label: FrameLabel::NoHand,
            confidence: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ChannelError {
    #[error("confusion matrix row {row} is not a probability distribution")]
    MalformedMatrix { row: usize },
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
}

/// Row-stochastic confusion matrix over [`LABEL_COUNT`] labels, dropout
/// probability, and RNG seed.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    confusion: Vec<Vec<f64>>,
    dropout_p: f64,
    seed: u64,
}

fn check_probability(p: f64) -> Result<f64, ChannelError> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(ChannelError::BadProbability(p))
    }
}

impl NoiseModel {
    pub fn new(confusion: Vec<Vec<f64>>, dropout_p: f64, seed: u64) -> Result<Self, ChannelError> {
        let model = Self {
            confusion,
            dropout_p: check_probability(dropout_p)?,
            seed,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn identity(seed: u64) -> Self {
        Self::symmetric(0.0, 0.0, seed).expect("valid probabilities")
    }

    /// Each label is kept with probability `1 - error_rate` and otherwise
    /// replaced by one of the other labels, uniformly.
    pub fn symmetric(error_rate: f64, dropout_p: f64, seed: u64) -> Result<Self, ChannelError> {
        let p = check_probability(error_rate)?;
        let off = p / (LABEL_COUNT - 1) as f64;
        let confusion = (0..LABEL_COUNT)
            .map(|i| {
                (0..LABEL_COUNT)
                    .map(|j| if i == j { 1.0 - p } else { off })
                    .collect()
            })
            .collect();
        Self::new(confusion, dropout_p, seed)
    }

    pub fn confusion(&self) -> &[Vec<f64>] {
        &self.confusion
    }

    pub fn dropout_p(&self) -> f64 {
        self.dropout_p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.confusion.len() != LABEL_COUNT {
            return Err(ChannelError::MalformedMatrix {
                row: self.confusion.len().min(LABEL_COUNT),
            });
        }
        for (row, values) in self.confusion.iter().enumerate() {
            let ok = values.len() == LABEL_COUNT
                && values.iter().all(|v| v.is_finite() && *v >= 0.0)
                && (values.iter().sum::<f64>() - 1.0).abs() <= ROW_SUM_TOL;
            if !ok {
                return Err(ChannelError::MalformedMatrix { row });
            }
        }
        Ok(())
    }
}

fn sample_row(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (j, p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    // rounding left u above the final partial sum: last non-zero entry
    row.iter().rposition(|p| *p > 0.0).unwrap_or(row.len() - 1)
}

/// Passes frames through the noise model. Labels that survive unchanged keep
/// their confidence; substituted labels get a confidence drawn uniformly
/// from [0.5, 1]; dropped frames become `NO_HAND` with confidence 0.
pub fn corrupt(
    true_frames: &[FrameObservation],
    noise: &NoiseModel,
) -> Result<Vec<FrameObservation>, ChannelError> {
    noise.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let out = true_frames
        .iter()
        .map(|frame| {
            let u: f64 = rng.random();
            let drop: f64 = rng.random();
            let conf: f64 = rng.random_range(0.5..=1.0);
            let j = sample_row(&noise.confusion[frame.label.index()], u);
            let label = FrameLabel::from_index(j).expect("index within label set");
            if drop < noise.dropout_p {
                FrameObservation {
                    label: FrameLabel::NoHand,
                    confidence: 0.0,
                }
            } else if label == frame.label {
                *frame
            } else {
                FrameObservation {
                    label,
                    confidence: conf,
                }
            }
        })
        .collect();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DebounceConfig {
    pub window_n: usize,
    pub min_confidence: f64,
    pub require_gap: bool,
}

impl Default for DebounceConfig {
    fn default() -> Self {
        Self {
            window_n: 5,
            min_confidence: 0.6,
            require_gap: true,
        }
    }
}

impl DebounceConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.window_n == 0 {
            return Err("debounce.window_n must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.min_confidence) {
            return Err("debounce.min_confidence must lie in [0, 1]".into());
        }
        Ok(())
    }

    /// Frames a scripted gesture is held for when rendering scenarios.
    pub fn frames_per_gesture(&self) -> usize {
        3 * self.window_n
    }

    /// `NO_HAND` frames rendered between scripted gestures.
    pub fn gap_frames(&self) -> usize {
        self.window_n
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Debouncer {
    candidate: Option<GestureToken>,
    run: usize,
    last_fired: Option<GestureToken>,
}

impl Debouncer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, frame: FrameObservation, cfg: &DebounceConfig) -> Option<GestureToken> {
        let token = match frame.label {
            FrameLabel::NoHand => {
                *self = Self::default();
                return None;
            }
            FrameLabel::Hand(_) if frame.confidence < cfg.min_confidence => {
                self.candidate = None;
                self.run = 0;
                return None;
            }
            FrameLabel::Hand(t) => t,
        };
        if self.candidate == Some(token) {
            self.run += 1;
        } else {
            self.candidate = Some(token);
            self.run = 1;
        }
        if self.run != cfg.window_n {
            return None;
        }
        if cfg.require_gap && self.last_fired == Some(token) {
            return None;
        }
        self.last_fired = Some(token);
        Some(token)
    }
}

pub fn debounce(
    state: &mut Debouncer,
    frame: FrameObservation,
    cfg: &DebounceConfig,
) -> Option<GestureToken> {
    state.push(frame, cfg)
}

pub fn debounce_all(frames: &[FrameObservation], cfg: &DebounceConfig) -> Vec<GestureToken> {
    let mut state = Debouncer::new();
    frames.iter().filter_map(|f| state.push(*f, cfg)).collect()
}

/// Renders each gesture as `frames_per_gesture` confident frames followed by
/// `gap_frames` of `NO_HAND`.
pub fn render_script(
    gestures: &[GestureToken],
    frames_per_gesture: usize,
    gap_frames: usize,
) -> Vec<FrameObservation> {
    let mut out = Vec::with_capacity(gestures.len() * (frames_per_gesture + gap_frames));
    for &g in gestures {
        out.extend(std::iter::repeat_n(FrameObservation::hand(g, 1.0), frames_per_gesture));
        out.extend(std::iter::repeat_n(FrameObservation::no_hand(), gap_frames));
    }
    out
}

/// Levenshtein distance between two token sequences.
pub fn edit_distance(a: &[GestureToken], b: &[GestureToken]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance normalised by the length of the true sequence.
pub fn event_error_rate(truth: &[GestureToken], recognized: &[GestureToken]) -> f64 {
    if truth.is_empty() {
        return if recognized.is_empty() { 0.0 } else { 1.0 };
    }
    edit_distance(truth, recognized) as f64 / truth.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::GestureToken::{self, *};
    use proptest::prelude::*;
    use rand::Rng;

    fn frames(label: FrameLabel, n: usize) -> Vec<FrameObservation> {
        vec![
            FrameObservation {
                label,
                confidence: 0.9
            };
            n
        ]
    }

    fn random_gestures(n: usize, seed: u64) -> Vec<GestureToken> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| GestureToken::ALL[rng.random_range(0..ALPHABET_SIZE)])
            .collect()
    }

    #[test]
    fn identity_channel_is_transparent() {
        let input = render_script(&[StartComm, Mosaic, Digit1, EndComm], 6, 2);
        assert_eq!(corrupt(&input, &NoiseModel::identity(3)).unwrap(), input);
    }

    #[test]
    fn full_dropout_blanks_everything() {
        let input = render_script(&[StartComm, Mosaic], 6, 2);
        let noise = NoiseModel::symmetric(0.0, 1.0, 3).unwrap();
        assert!(corrupt(&input, &noise)
            .unwrap()
            .iter()
            .all(|f| f.label == FrameLabel::NoHand));
    }

    #[test]
    fn per_frame_flip_rate() {
        // binomial(1e5, 0.05): sd ~ 0.0007, so ±0.005 is ~7 sd
        let input = vec![FrameObservation::hand(Photo, 1.0); 100_000];
        let noise = NoiseModel::symmetric(0.05, 0.0, 11).unwrap();
        let out = corrupt(&input, &noise).unwrap();
        let flips = out.iter().filter(|f| f.label != FrameLabel::Hand(Photo)).count();
        let rate = flips as f64 / input.len() as f64;
        assert!((rate - 0.05).abs() <= 0.005, "rate {rate}");
        assert!(out.iter().all(|f| (0.0..=1.0).contains(&f.confidence)));
    }

    #[test]
    fn malformed_matrices_are_rejected() {
        let mut rows = NoiseModel::identity(0).confusion().to_vec();
        rows[4][4] = 0.9;
        assert_eq!(
            NoiseModel::new(rows.clone(), 0.0, 0),
            Err(ChannelError::MalformedMatrix { row: 4 })
        );
        rows[4][5] = 0.1;
        assert!(NoiseModel::new(rows.clone(), 0.0, 0).is_ok());
        rows[4][5] = -0.1;
        rows[4][4] = 1.1;
        assert_eq!(
            NoiseModel::new(rows.clone(), 0.0, 0),
            Err(ChannelError::MalformedMatrix { row: 4 })
        );
        rows.pop();
        assert!(NoiseModel::new(rows, 0.0, 0).is_err());
        assert!(NoiseModel::symmetric(1.5, 0.0, 0).is_err());
        assert!(NoiseModel::symmetric(0.1, -0.2, 0).is_err());
    }

    #[test]
    fn corrupt_is_seed_reproducible() {
        let input = render_script(&random_gestures(200, 1), 10, 3);
        let noise = NoiseModel::symmetric(0.2, 0.05, 99).unwrap();
        assert_eq!(corrupt(&input, &noise), corrupt(&input, &noise));
        let other = NoiseModel::symmetric(0.2, 0.05, 100).unwrap();
        assert_ne!(corrupt(&input, &noise), corrupt(&input, &other));
    }

    #[test]
    fn debounce_examples() {
        let cfg = DebounceConfig::default();
        assert_eq!(debounce_all(&frames(FrameLabel::Hand(Mosaic), 5), &cfg), vec![Mosaic]);

        let mut short = frames(FrameLabel::Hand(Mosaic), 4);
        short.push(FrameObservation::no_hand());
        assert!(debounce_all(&short, &cfg).is_empty());

        assert_eq!(debounce_all(&frames(FrameLabel::Hand(Mosaic), 12), &cfg), vec![Mosaic]);
    }

    #[test]
    fn gap_rule() {
        let mut stream = frames(FrameLabel::Hand(Mosaic), 5);
        stream.extend(frames(FrameLabel::Hand(GoUp), 1));
        stream.extend(frames(FrameLabel::Hand(Mosaic), 5));
        let gap = DebounceConfig::default();
        assert_eq!(debounce_all(&stream, &gap), vec![Mosaic]);
        let no_gap = DebounceConfig {
            require_gap: false,
            ..gap.clone()
        };
        assert_eq!(debounce_all(&stream, &no_gap), vec![Mosaic, Mosaic]);

        let mut separated = frames(FrameLabel::Hand(Mosaic), 5);
        separated.push(FrameObservation::no_hand());
        separated.extend(frames(FrameLabel::Hand(Mosaic), 5));
        assert_eq!(debounce_all(&separated, &gap), vec![Mosaic, Mosaic]);
    }

    #[test]
    fn low_confidence_frames_break_runs() {
        let cfg = DebounceConfig::default();
        let mut stream = frames(FrameLabel::Hand(Photo), 3);
        stream.push(FrameObservation::hand(Photo, 0.3));
        stream.extend(frames(FrameLabel::Hand(Photo), 3));
        assert!(debounce_all(&stream, &cfg).is_empty());
    }

    #[test]
    fn window_of_one() {
        let cfg = DebounceConfig {
            window_n: 1,
            ..DebounceConfig::default()
        };
        let stream = render_script(&[Digit1, Digit1, Digit2], 3, 1);
        assert_eq!(debounce_all(&stream, &cfg), vec![Digit1, Digit1, Digit2]);
    }

    #[test]
    fn edit_distance_basics() {
        assert_eq!(edit_distance(&[], &[]), 0);
        assert_eq!(edit_distance(&[Photo], &[]), 1);
        assert_eq!(edit_distance(&[Photo, GoUp, Digit1], &[Photo, Digit1]), 1);
        assert_eq!(edit_distance(&[Photo, GoUp], &[GoUp, Photo]), 2);
        assert_eq!(event_error_rate(&[Photo, GoUp], &[Photo, GoDown]), 0.5);
    }

    #[test]
    fn noise_suppression_below_frame_error() {
        let cfg = DebounceConfig::default();
        let truth = random_gestures(10_000, 5);
        let clean = render_script(&truth, cfg.frames_per_gesture(), cfg.gap_frames());
        for p in [0.05, 0.1] {
            let noise = NoiseModel::symmetric(p, 0.0, 2024).unwrap();
            let events = debounce_all(&corrupt(&clean, &noise).unwrap(), &cfg);
            let rate = event_error_rate(&truth, &events);
            assert!(rate < p, "p={p}: event error {rate}");
        }
    }

    proptest! {
        #[test]
        fn clean_channel_recovers_script(
            idx in prop::collection::vec(0..ALPHABET_SIZE, 0..40),
            window in 1usize..8,
            extra in 0usize..6,
            gap in 1usize..4,
            seed in any::<u64>(),
        ) {
            let gestures: Vec<GestureToken> = idx.iter().map(|&i| GestureToken::ALL[i]).collect();
            let cfg = DebounceConfig { window_n: window, ..DebounceConfig::default() };
            let clean = render_script(&gestures, window + extra, gap);
            let observed = corrupt(&clean, &NoiseModel::identity(seed)).unwrap();
            prop_assert_eq!(debounce_all(&observed, &cfg), gestures);
        }
    }
}
