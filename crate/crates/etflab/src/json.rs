//! File schemas and full-precision JSON serialization.
//!
//! Every floating-point value is written as `{:.16e}` (17 significant
//! digits), which round-trips f64 exactly and keeps output files
//! byte-identical across runs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{ConfigOrPair, Objective, OptResult};
use crate::scalar::Real;
use crate::sphere::Configuration;
use crate::uniformity::UniformityReport;

struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            // serde_json's convention for values JSON cannot carry.
            write!(writer, "null")
        }
    }

    fn write_f32<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.8e}")
        } else {
            write!(writer, "null")
        }
    }
}

/// Serializes any schema value with full-precision floats.
pub fn to_json_string<S: Serialize>(value: &S) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value
        .serialize(&mut ser)
        .expect("schema serialization is infallible");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// On-disk form of a configuration:
/// `{"n": int, "m": int, "points": [[f64; m]; n]}`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigurationJson {
    pub n: usize,
    pub m: usize,
    pub points: Vec<Vec<f64>>,
}

impl ConfigurationJson {
    pub fn from_configuration<T: Real>(config: &Configuration<T>) -> Self {
        ConfigurationJson {
            n: config.n(),
            m: config.m(),
            points: config
                .rows()
                .map(|row| row.iter().map(|x| x.to_f64().expect("finite")).collect())
                .collect(),
        }
    }

    pub fn into_configuration(self) -> Result<Configuration<f64>> {
        if self.points.len() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "header says n={}, found {} points",
                self.n,
                self.points.len()
            )));
        }
        if self.points.iter().any(|p| p.len() != self.m) {
            return Err(Error::ShapeMismatch(format!(
                "header says m={}, found a row of different length",
                self.m
            )));
        }
        Configuration::new(self.points)
    }
}

/// Writes a configuration as JSON text.
pub fn configuration_to_json<T: Real>(config: &Configuration<T>) -> String {
    to_json_string(&ConfigurationJson::from_configuration(config))
}

/// Reads a configuration from JSON text, validating shape and norms.
pub fn configuration_from_json(text: &str) -> Result<Configuration<f64>> {
    let parsed: ConfigurationJson = serde_json::from_str(text)
        .map_err(|e| Error::Parameter(format!("cannot parse configuration JSON: {e}")))?;
    parsed.into_configuration()
}

/// On-disk form of an optimization result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptResultJson {
    pub objective: String,
    pub alpha: f64,
    pub best_loss: f64,
    pub grad_norm_final: f64,
    pub iterations_used: usize,
    pub restart_index: usize,
    pub converged: bool,
    pub config: ConfigurationJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_v: Option<ConfigurationJson>,
    /// (iteration, loss) samples, subsampled to at most 1000 entries.
    pub trace: Vec<(usize, f64)>,
}

impl OptResultJson {
    pub fn from_result(result: &OptResult<f64>, objective: Objective, alpha: f64) -> Self {
        let (config, config_v) = match &result.best {
            ConfigOrPair::Single(c) => (ConfigurationJson::from_configuration(c), None),
            ConfigOrPair::Pair(p) => (
                ConfigurationJson::from_configuration(p.u()),
                Some(ConfigurationJson::from_configuration(p.v())),
            ),
        };
        OptResultJson {
            objective: objective.name().to_string(),
            alpha,
            best_loss: result.best_loss,
            grad_norm_final: result.grad_norm_final,
            iterations_used: result.iterations_used,
            restart_index: result.restart_index,
            converged: result.converged,
            config,
            config_v,
            trace: subsample(&result.trace, 1000),
        }
    }
}

/// Keeps at most `limit` trace samples, always retaining the first and last.
pub fn subsample(trace: &[(usize, f64)], limit: usize) -> Vec<(usize, f64)> {
    if trace.len() <= limit {
        return trace.to_vec();
    }
    let stride = trace.len().div_ceil(limit);
    let mut out: Vec<(usize, f64)> = trace.iter().step_by(stride).copied().collect();
    if out.last() != trace.last() {
        if out.len() == limit {
            out.pop();
        }
        out.push(*trace.last().expect("nonempty"));
    }
    out
}

/// On-disk form of the seven-field energy report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyReportJson {
    pub loss_sym: f64,
    pub lower_bound: f64,
    pub jensen_upper: f64,
    pub frame_potential: f64,
    pub pair_exp_mean: f64,
    pub uniform_energy: f64,
    pub gap: f64,
}

impl EnergyReportJson {
    pub fn from_report(report: &crate::energy::EnergyReport<f64>) -> Self {
        EnergyReportJson {
            loss_sym: report.loss_sym,
            lower_bound: report.lower_bound,
            jensen_upper: report.jensen_upper,
            frame_potential: report.frame_potential,
            pair_exp_mean: report.pair_exp_mean,
            uniform_energy: report.uniform_energy,
            gap: report.gap,
        }
    }
}

/// On-disk form of the uniformity report; moments as `[l, value]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniformityReportJson {
    pub n: usize,
    pub m: usize,
    pub mean_resultant: f64,
    pub frame_ratio: f64,
    pub moments: Vec<(usize, f64)>,
}

impl UniformityReportJson {
    pub fn from_report(report: &UniformityReport<f64>) -> Self {
        UniformityReportJson {
            n: report.n,
            m: report.m,
            mean_resultant: report.mean_resultant,
            frame_ratio: report.frame_ratio,
            moments: report.moments.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::sample_uniform;

    #[test]
    fn configuration_round_trips_exactly() {
        let c = sample_uniform::<f64>(5, 3, 99).unwrap();
        let text = configuration_to_json(&c);
        let back = configuration_from_json(&text).unwrap();
        assert_eq!(c.flat(), back.flat(), "bit-exact round trip");
        // And the serialization itself is reproducible.
        assert_eq!(text, configuration_to_json(&back));
    }

    #[test]
    fn configuration_json_validates() {
        assert!(configuration_from_json("{").is_err());
        assert!(configuration_from_json(r#"{"n":2,"m":2,"points":[[1.0,0.0]]}"#).is_err());
        assert!(
            configuration_from_json(r#"{"n":2,"m":2,"points":[[1.0,0.0],[0.5,0.0]]}"#).is_err(),
            "non-unit row"
        );
        let ok = configuration_from_json(r#"{"n":2,"m":2,"points":[[1.0,0.0],[0.0,-1.0]]}"#);
        assert!(ok.is_ok());
    }

    #[test]
    fn floats_are_written_in_scientific_full_precision() {
        #[derive(Serialize)]
        struct Probe {
            x: f64,
        }
        let text = to_json_string(&Probe { x: 0.1 });
        assert_eq!(text, r#"{"x":1.0000000000000001e-1}"#);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["x"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn non_finite_floats_serialize_as_null() {
        #[derive(Serialize)]
        struct Probe {
            x: f64,
        }
        let text = to_json_string(&Probe { x: f64::INFINITY });
        assert_eq!(text, r#"{"x":null}"#);
        assert!(serde_json::from_str::<serde_json::Value>(&text).is_ok());
    }

    #[test]
    fn subsample_keeps_ends_and_limit() {
        let trace: Vec<(usize, f64)> = (0..5000).map(|i| (i, i as f64)).collect();
        let s = subsample(&trace, 1000);
        assert!(s.len() <= 1000);
        assert_eq!(s[0], (0, 0.0));
        assert_eq!(*s.last().unwrap(), (4999, 4999.0));
        assert_eq!(subsample(&trace[..3], 1000).len(), 3);
    }
}
