//! Shot-noise model of coincidence acquisition.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::state::ProbabilityTensor;

/// Count budget, background level and root seed of a simulated acquisition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub total_counts_per_setting: u64,
    /// Coincidence-to-accidental ratio; `f64::INFINITY` disables accidentals.
    #[serde(serialize_with = "ser_car", deserialize_with = "de_car", default = "inf")]
    pub car: f64,
    pub seed: u64,
    #[serde(default)]
    pub subtract_accidentals: bool,
}

fn inf() -> f64 {
    f64::INFINITY
}

fn ser_car<S: Serializer>(car: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if car.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*car)
    }
}

fn de_car<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Car {
        Num(f64),
        Text(String),
    }
    match Car::deserialize(d)? {
        Car::Num(x) => Ok(x),
        Car::Text(t) if matches!(t.as_str(), "inf" | "infinite" | "infinity") => Ok(f64::INFINITY),
        Car::Text(t) => Err(serde::de::Error::custom(format!("invalid car {t:?}"))),
    }
}

impl NoiseConfig {
    pub fn new(total_counts_per_setting: u64, car: f64, seed: u64) -> Self {
        Self { total_counts_per_setting, car, seed, subtract_accidentals: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_counts_per_setting == 0 {
            return Err(Error::InvalidArgument("total counts per setting must be at least 1".into()));
        }
        if !(self.car > 0.0) {
            return Err(Error::InvalidArgument("car must be positive".into()));
        }
        Ok(())
    }
}

/// Location of one sampling stream below the root seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPath {
    pub root: u64,
    pub eval_index: u64,
    pub setting_id: u32,
}

impl SeedPath {
    /// ChaCha stream id; injective while `setting_id < 2^16` and `eval_index < 2^48`.
    pub fn stream(&self) -> u64 {
        (self.eval_index << 16) | u64::from(self.setting_id & 0xffff)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.root);
        rng.set_stream(self.stream());
        rng
    }
}

impl fmt::Display for SeedPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.root, self.eval_index, self.setting_id)
    }
}

/// Coincidence counts of one measurement setting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsRecord {
    pub setting_id: u32,
    pub cc: [[u64; 4]; 4],
    pub cc_total: u64,
    pub seed_path: String,
}

impl CountsRecord {
    pub fn from_counts(setting_id: u32, cc: [[u64; 4]; 4], seed_path: String) -> Self {
        let cc_total = cc.iter().flatten().sum();
        Self { setting_id, cc, cc_total, seed_path }
    }

    /// Compact log line `{setting_id, cc: [16 ints], seed_path}`.
    pub fn to_log_json(&self) -> serde_json::Value {
        let flat: Vec<u64> = self.cc.iter().flatten().copied().collect();
        serde_json::json!({ "setting_id": self.setting_id, "cc": flat, "seed_path": self.seed_path })
    }
}

/// Detection probabilities with a uniform accidental floor `a = Σp / (16·car)`.
pub fn with_accidentals(p: &ProbabilityTensor, car: f64) -> ProbabilityTensor {
    if car.is_infinite() {
        return *p;
    }
    let a = p.sum() / (16.0 * car);
    let norm = 1.0 + 16.0 * a;
    let q = p.p.map(|row| row.map(|x| (x + a) / norm));
    ProbabilityTensor { p: q }
}

/// Removes the accidental floor from normalized estimates (clipped at zero).
pub fn subtract_accidental_floor(p_hat: &ProbabilityTensor, car: f64) -> ProbabilityTensor {
    if car.is_infinite() {
        return *p_hat;
    }
    let a = 1.0 / (16.0 * car);
    let mut q = p_hat.p.map(|row| row.map(|x| (x * (1.0 + 16.0 * a) - a).max(0.0)));
    let s: f64 = q.iter().flatten().sum();
    if s > 0.0 {
        q = q.map(|row| row.map(|x| x / s));
    }
    ProbabilityTensor { p: q }
}

/// Multinomial draw of `cfg.total_counts_per_setting` coincidences over the
/// 16 outcomes, from the stream `(cfg.seed, eval_index, setting_id)`.
pub fn sample_counts(p: &ProbabilityTensor, cfg: &NoiseConfig, setting_id: u32, eval_index: u64) -> Result<CountsRecord> {
    cfg.validate()?;
    let path = SeedPath { root: cfg.seed, eval_index, setting_id };
    let mut rng = path.rng();
    let q = with_accidentals(p, cfg.car);
    let total_mass = q.sum();
    if !(total_mass > 0.0) {
        return Err(Error::InvalidArgument("probability tensor has no mass".into()));
    }
    let mut cc = [[0u64; 4]; 4];
    let mut remaining = cfg.total_counts_per_setting;
    let mut mass_left = total_mass;
    for k in 0..16 {
        let (a, b) = (k / 4, k % 4);
        if remaining == 0 {
            break;
        }
        let pk = q.p[a][b];
        let draw = if k == 15 || pk >= mass_left {
            remaining
        } else if pk <= 0.0 {
            0
        } else {
            let frac = (pk / mass_left).clamp(0.0, 1.0);
            Binomial::new(remaining, frac)
                .map_err(|e| Error::Numerical(format!("binomial draw: {e}")))?
                .sample(&mut rng)
        };
        cc[a][b] = draw;
        remaining -= draw;
        mass_left -= pk;
    }
    Ok(CountsRecord::from_counts(setting_id, cc, path.to_string()))
}

/// Relative frequencies `cc / cc_total`.
pub fn estimate_probabilities(rec: &CountsRecord) -> Result<ProbabilityTensor> {
    let total: u64 = rec.cc.iter().flatten().sum();
    if total == 0 || rec.cc_total == 0 {
        return Err(Error::EmptyRecord);
    }
    let n = total as f64;
    Ok(ProbabilityTensor { p: rec.cc.map(|row| row.map(|c| c as f64 / n)) })
}
