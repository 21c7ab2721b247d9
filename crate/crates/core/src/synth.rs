//! Deterministic synthetic gesture corpora.
//!
//! Every gesture class has a template per axis, each a sum of at most three
//! sinusoids over a normalized time grid `t ∈ [0, 1]`. Some classes move
//! along one axis only, others along two or three. A sample is:
//!
//! * the template resampled at `n` points, where `n` shrinks as the
//!   user-and-trial speed factor grows;
//! * with a per-user amplitude scale, phase shift and offset applied;
//! * plus Gaussian noise.
//!
//! Every template, user and sample draws from its own ChaCha8 stream, so
//! generation is a pure function of the [`SynthSpec`] no matter how it is parallelized.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{write_manifest, AxisTriple, Dataset, GestureSample, SampleId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub users: u32,
    pub gestures: u32,
    pub samples_per_gesture_per_user: u32,
    /// Inclusive `(min, max)` number of readings.
    pub length_range: (usize, usize),
    /// Relative spread of per-user speed; per-trial spread is half of it.
    pub user_speed_jitter: f64,
    /// Standard deviation of additive noise, in g.
    pub noise_sigma: f64,
    /// Scale of per-user amplitude, phase and offset perturbations.
    pub user_style_offset: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// The frozen fixture: 8 users × 8 gestures × 10 samples, seed 7. Noise and
    /// user style are strong enough that unseen users are measurably harder.
    pub fn easy() -> Self {
        SynthSpec {
            users: 8,
            gestures: 8,
            samples_per_gesture_per_user: 10,
            length_range: (40, 120),
            user_speed_jitter: 0.3,
            noise_sigma: 0.5,
            user_style_offset: 0.6,
            seed: 7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.users == 0 || self.gestures == 0 || self.samples_per_gesture_per_user == 0 {
            return bad("users, gestures and samples per gesture must all be at least 1".into());
        }
        let (min, max) = self.length_range;
        if min < 8 || max < min {
            return bad(format!("length range must satisfy 8 <= min <= max, got ({min}, {max})"));
        }
        for (name, v) in [
            ("noise_sigma", self.noise_sigma),
            ("user_speed_jitter", self.user_speed_jitter),
            ("user_style_offset", self.user_style_offset),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if self.user_speed_jitter >= 1.0 {
            return bad(format!("user_speed_jitter must be below 1, got {}", self.user_speed_jitter));
        }
        Ok(())
    }

    pub fn total_samples(&self) -> usize {
        (self.users * self.gestures * self.samples_per_gesture_per_user) as usize
    }
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self::easy()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Tone {
    amplitude: f64,
    cycles: f64,
    phase: f64,
}

/// Per-axis tones plus a constant offset; an inactive axis has no tones.
#[derive(Debug, Clone, PartialEq)]
struct Template {
    axes: [(Vec<Tone>, f64); 3],
}

impl Template {
    fn eval(&self, axis: usize, t: f64, shift: f64) -> f64 {
        let (tones, offset) = &self.axes[axis];
        offset + tones.iter().map(|k| k.amplitude * (TAU * k.cycles * t + k.phase + shift).sin()).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy)]
struct UserStyle {
    rate: f64,
    amplitude: [f64; 3],
    shift: f64,
    offset: [f64; 3],
}

// stream tags keep template, user and sample generators disjoint
const TEMPLATE_STREAM: u64 = 1 << 60;
const USER_STREAM: u64 = 2 << 60;
const SAMPLE_STREAM: u64 = 3 << 60;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn template(seed: u64, gesture: u32) -> Template {
    let mut rng = stream(seed, TEMPLATE_STREAM | gesture as u64);
    // cycle through 1-D, 2-D and 3-D motions
    let active = (gesture as usize - 1) % 3 + 1;
    let mut order = [0usize, 1, 2];
    for i in (1..3).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut axes: [(Vec<Tone>, f64); 3] = Default::default();
    for &axis in &order[..active] {
        let n_tones = rng.random_range(1..=3);
        let tones = (0..n_tones)
            .map(|_| Tone {
                amplitude: rng.random_range(0.4..1.2),
                cycles: rng.random_range(1..=6) as f64 * 0.5,
                phase: rng.random_range(0.0..TAU),
            })
            .collect();
        axes[axis] = (tones, rng.random_range(-0.3..0.3));
    }
    Template { axes }
}

fn user_style(spec: &SynthSpec, user: u32) -> UserStyle {
    let mut rng = stream(spec.seed, USER_STREAM | user as u64);
    let mut spread = |scale: f64| if scale > 0.0 { rng.random_range(-scale..scale) } else { 0.0 };
    let rate = 1.0 + spread(spec.user_speed_jitter);
    let s = spec.user_style_offset;
    UserStyle {
        rate,
        amplitude: [1.0 + spread(s), 1.0 + spread(s), 1.0 + spread(s)],
        shift: spread(s * std::f64::consts::PI),
        offset: [spread(0.5 * s), spread(0.5 * s), spread(0.5 * s)],
    }
}

fn sample(spec: &SynthSpec, tpl: &Template, style: &UserStyle, id: SampleId) -> Result<GestureSample> {
    let key = ((id.user as u64) << 40) | ((id.gesture as u64) << 20) | id.trial as u64;
    let mut rng = stream(spec.seed, SAMPLE_STREAM | key);
    let half = 0.5 * spec.user_speed_jitter;
    let trial_rate = 1.0 + if half > 0.0 { rng.random_range(-half..half) } else { 0.0 };
    let (min, max) = spec.length_range;
    let base = 0.5 * (min + max) as f64;
    let n = ((base / (style.rate * trial_rate)).round() as usize).clamp(min, max);
    let noise = Normal::new(0.0, spec.noise_sigma).expect("sigma validated");
    let readings = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            let mut v = [0.0; 3];
            for (axis, out) in v.iter_mut().enumerate() {
                *out = style.amplitude[axis] * tpl.eval(axis, t, style.shift) + style.offset[axis];
                if spec.noise_sigma > 0.0 {
                    *out += noise.sample(&mut rng);
                }
            }
            AxisTriple::new(v[0], v[1], v[2])
        })
        .collect();
    GestureSample::new(id, readings)
}

/// Generates the dataset described by `spec`, ordered by (user, gesture, trial).
pub fn generate(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let templates: Vec<Template> = (1..=spec.gestures).map(|g| template(spec.seed, g)).collect();
    let styles: Vec<UserStyle> = (1..=spec.users).map(|u| user_style(spec, u)).collect();
    let ids: Vec<SampleId> = (1..=spec.users)
        .flat_map(|user| {
            (1..=spec.gestures).flat_map(move |gesture| {
                (1..=spec.samples_per_gesture_per_user).map(move |trial| SampleId { user, gesture, trial, day: None })
            })
        })
        .collect();
    let samples = ids
        .par_iter()
        .map(|&id| sample(spec, &templates[id.gesture as usize - 1], &styles[id.user as usize - 1], id))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(samples)
}

/// Generates and writes the canonical manifest layout; returns the manifest path.
pub fn generate_to_dir(spec: &SynthSpec, dir: impl AsRef<Path>) -> Result<PathBuf> {
    write_manifest(&generate(spec)?, dir)
}
