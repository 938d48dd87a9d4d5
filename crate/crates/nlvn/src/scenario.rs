//! Scenario files: TOML with `[scenario]`, `[params]` and an optional
//! `[integrator]` table. Complex parameters are strings such as `"1.5-2j"`.
//!
//! ```toml
//! [scenario]
//! model = "mutation3"          # mutation3 | organism | multispecies
//! mode = "closed-form"         # or "integrate"
//! t_start = -40.0
//! t_end = 40.0
//! t_step = 0.5
//! outputs = ["xi", "conserved"]
//!
//! [params]
//! h_ratio = 1.0                # h = h_ratio * h0; or give h directly
//! alpha = 1.0
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use nlvn_core::solutions::{
    mutation3, two_species_closed_form, two_species_example, MultiSpeciesConfig, MultiSpeciesSolution, MutationParams,
    Organism, SwitchingProfile,
};
use nlvn_core::{CompositeLayout, DensityState, FeedbackPolynomial, OperatorMatrix, C64};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Default RK4 step when `[integrator]` is absent.
pub const DEFAULT_DT: f64 = 1e-3;

/// Largest time grid a scenario may request.
pub const MAX_SAMPLES: usize = 10_000_001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Mutation3,
    Organism,
    Multispecies,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Mutation3 => "mutation3",
            ModelKind::Organism => "organism",
            ModelKind::Multispecies => "multispecies",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    ClosedForm,
    Integrate,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::ClosedForm => "closed-form",
            Mode::Integrate => "integrate",
        }
    }
}

/// Observables a scenario may write, one CSV each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    /// Real and imaginary parts of the upper triangle.
    State,
    /// Moduli of the upper triangle.
    Moduli,
    Spectrum,
    /// Energy and the first four trace moments.
    Conserved,
    /// Finite-difference residual of the equation of motion.
    Residual,
    /// Frobenius distance between the integrated and the closed-form state.
    Error,
    Entropy,
    /// Eigenvalues of the normalized reduced states.
    Reduced,
    /// Minimum eigenvalue of the normalized partial transpose.
    Ppt,
    /// Position-space density, long format.
    Density,
    /// Complementarity probabilities and the uncertainty bound.
    Uncertainty,
    Switching,
    /// Off-diagonal amplitudes of the three-level family.
    Xi,
}

impl OutputKind {
    pub fn name(self) -> &'static str {
        match self {
            OutputKind::State => "state",
            OutputKind::Moduli => "moduli",
            OutputKind::Spectrum => "spectrum",
            OutputKind::Conserved => "conserved",
            OutputKind::Residual => "residual",
            OutputKind::Error => "error",
            OutputKind::Entropy => "entropy",
            OutputKind::Reduced => "reduced",
            OutputKind::Ppt => "ppt",
            OutputKind::Density => "density",
            OutputKind::Uncertainty => "uncertainty",
            OutputKind::Switching => "switching",
            OutputKind::Xi => "xi",
        }
    }
}

/// A parameter as written in the file.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
    List(Vec<ParamValue>),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(x) => write!(f, "{x:?}"),
            ParamValue::Text(s) => f.write_str(s),
            ParamValue::List(v) => {
                f.write_str("[")?;
                for (i, p) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenarioSection {
    #[serde(default)]
    name: Option<String>,
    model: ModelKind,
    #[serde(default)]
    mode: Mode,
    t_start: f64,
    t_end: f64,
    t_step: f64,
    outputs: Vec<OutputKind>,
    #[serde(default)]
    output_path: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    #[serde(default = "default_dt")]
    dt: f64,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    scenario: RawScenarioSection,
    #[serde(default)]
    params: BTreeMap<String, ParamValue>,
    #[serde(default)]
    integrator: Option<RawIntegrator>,
}

/// The closed-form family a scenario evaluates.
#[derive(Clone, Debug)]
pub enum Model {
    Mutation3(MutationParams),
    Organism,
    Multispecies {
        solution: Box<MultiSpeciesSolution>,
        /// Set for the two-species worked example, which has a closed form.
        profile: Option<SwitchingProfile>,
    },
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Mutation3(_) => ModelKind::Mutation3,
            Model::Organism => ModelKind::Organism,
            Model::Multispecies { .. } => ModelKind::Multispecies,
        }
    }

    pub fn state(&self, t: f64) -> nlvn_core::Result<DensityState> {
        match self {
            Model::Mutation3(p) => mutation3(p, t),
            Model::Organism => Organism.solution(t),
            Model::Multispecies { profile: Some(p), .. } => two_species_closed_form(t, *p),
            Model::Multispecies { solution, .. } => solution.at(t),
        }
    }

    pub fn hamiltonian(&self) -> OperatorMatrix {
        match self {
            Model::Mutation3(p) => p.hamiltonian(),
            Model::Organism => Organism.hamiltonian(),
            Model::Multispecies { solution, .. } => solution.config().hamiltonian(),
        }
    }

    pub fn feedback(&self) -> FeedbackPolynomial {
        match self {
            Model::Mutation3(p) => p.feedback(),
            Model::Organism => Organism.feedback(),
            Model::Multispecies { solution, .. } => solution.config().feedback(),
        }
    }

    /// Normalized reduced states of the two subsystems, if the model has any.
    pub fn reductions(&self, state: &DensityState) -> nlvn_core::Result<Option<[DensityState; 2]>> {
        use nlvn_core::linalg::partial_trace;
        match self {
            Model::Mutation3(_) => Ok(None),
            Model::Organism => {
                let o = Organism;
                let n = state.normalized();
                let one = partial_trace(&n, &o.layout(), o.particle_factor(1)?)?;
                let two = partial_trace(&n, &o.layout(), o.particle_factor(2)?)?;
                Ok(Some([one, two]))
            }
            Model::Multispecies { solution, .. } => {
                let cfg = solution.config();
                let n = state.normalized();
                Ok(Some([cfg.reduced(&n, 0)?, cfg.reduced(&n, 1)?]))
            }
        }
    }

    /// The state viewed as a bipartite operator, with its layout.
    pub fn bipartite(&self, state: &DensityState) -> nlvn_core::Result<Option<(DensityState, CompositeLayout)>> {
        match self {
            Model::Mutation3(_) => Ok(None),
            Model::Organism => Ok(Some((state.clone(), Organism.layout()))),
            Model::Multispecies { solution, .. } => {
                let cfg = solution.config();
                Ok(Some((cfg.embed_species(state)?, cfg.species_layout())))
            }
        }
    }
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub mode: Mode,
    pub t_start: f64,
    pub t_end: f64,
    pub t_step: f64,
    pub dt: f64,
    pub outputs: Vec<OutputKind>,
    pub output_path: Option<PathBuf>,
    raw: RawScenario,
}

impl Scenario {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
        Self::parse(&text, stem)
    }

    /// Parses and validates scenario text; `default_name` names the outputs
    /// when the file has no `name` key.
    pub fn parse(text: &str, default_name: &str) -> CliResult<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| CliError::validation(e.to_string()))?;
        Self::from_raw(raw, default_name)
    }

    fn from_raw(raw: RawScenario, default_name: &str) -> CliResult<Self> {
        let s = &raw.scenario;
        let name = s.name.clone().unwrap_or_else(|| default_name.to_string());
        if name.is_empty() || name.contains(['/', '\\']) {
            return Err(CliError::validation(format!("scenario name {name:?} is not a plain file stem")));
        }
        if !(s.t_start.is_finite() && s.t_end.is_finite() && s.t_start < s.t_end) {
            return Err(CliError::validation("need finite t_start < t_end"));
        }
        if !(s.t_step > 0.0 && s.t_step.is_finite()) {
            return Err(CliError::validation("t_step must be positive"));
        }
        if (s.t_end - s.t_start) / s.t_step >= MAX_SAMPLES as f64 {
            return Err(CliError::validation(format!("time grid exceeds {MAX_SAMPLES} samples")));
        }
        if s.outputs.is_empty() {
            return Err(CliError::validation("outputs list is empty"));
        }
        let mut outputs = s.outputs.clone();
        outputs.sort();
        outputs.dedup();

        let dt = raw.integrator.as_ref().map_or(DEFAULT_DT, |i| i.dt);
        if s.mode == Mode::Integrate {
            if !(dt > 0.0 && dt <= s.t_step) {
                return Err(CliError::validation("integrator dt must be positive and no larger than t_step"));
            }
            let stride = s.t_step / dt;
            if (stride - stride.round()).abs() > 1e-9 * stride {
                return Err(CliError::validation("t_step must be an integer multiple of the integrator dt"));
            }
        } else if raw.integrator.is_some() {
            return Err(CliError::validation("[integrator] only applies to mode = \"integrate\""));
        }

        let model = build_model(s.model, &raw.params)?;
        for &out in &outputs {
            check_output(&model, s.mode, out)?;
        }

        Ok(Self {
            name,
            model,
            mode: s.mode,
            t_start: s.t_start,
            t_end: s.t_end,
            t_step: s.t_step,
            dt,
            outputs,
            output_path: s.output_path.clone(),
            raw,
        })
    }

    /// The same scenario with one numeric parameter replaced.
    pub fn with_param(&self, key: &str, value: f64) -> CliResult<Self> {
        let mut raw = self.raw.clone();
        match raw.params.get(key) {
            Some(ParamValue::Number(_)) => {}
            Some(_) => return Err(CliError::validation(format!("parameter {key} is not a real number"))),
            None => return Err(CliError::validation(format!("scenario has no parameter {key}"))),
        }
        raw.params.insert(key.to_string(), ParamValue::Number(value));
        Self::from_raw(raw, &self.name)
    }

    pub fn params(&self) -> &BTreeMap<String, ParamValue> {
        &self.raw.params
    }

    /// Sample times `t_start, t_start + t_step, …` up to `t_end`.
    pub fn times(&self) -> Vec<f64> {
        time_grid(self.t_start, self.t_end, self.t_step)
    }

    /// Reproducibility stamp for CSV headers.
    pub fn stamp(&self) -> String {
        let mut s = format!(
            "nlvn {} scenario={} model={} mode={} t_start={:?} t_end={:?} t_step={:?}",
            env!("CARGO_PKG_VERSION"),
            self.name,
            self.model.kind().name(),
            self.mode.name(),
            self.t_start,
            self.t_end,
            self.t_step
        );
        if self.mode == Mode::Integrate {
            s.push_str(&format!(" dt={:?}", self.dt));
        }
        for (k, v) in &self.raw.params {
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }
}

/// Uniform grid from `lo` by `step`, landing exactly on `hi` when the step
/// divides the span.
pub fn time_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let ratio = (hi - lo) / step;
    let n = ratio.round();
    if (ratio - n).abs() <= 1e-9 * ratio.max(1.0) {
        let n = n as usize;
        (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
    } else {
        (0..=ratio.floor() as usize).map(|i| lo + step * i as f64).collect()
    }
}

/// `count` evenly spaced points covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

/// Parses `"re+imj"`, `"re-imj"`, `"imj"` or a bare real. `i` works as the
/// imaginary unit too.
pub fn parse_complex(text: &str) -> CliResult<C64> {
    let bad = || CliError::validation(format!("{text:?} is not a complex number of the form re+imj"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['j', 'i']) else {
        return s.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // the sign that splits real from imaginary is the last one not part of
    // an exponent and not leading
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |s: &str| match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s.parse::<f64>().map_err(|_| bad()),
    };
    let z = match split {
        Some(i) => C64::new(body[..i].parse::<f64>().map_err(|_| bad())?, imag(&body[i..])?),
        None => C64::new(0.0, imag(body)?),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

struct Params<'a> {
    map: &'a BTreeMap<String, ParamValue>,
    model: ModelKind,
}

impl Params<'_> {
    fn reject_unknown(&self, allowed: &[&str]) -> CliResult<()> {
        match self.map.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::validation(format!(
                "unknown parameter {k} for model {} (allowed: {})",
                self.model.name(),
                if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") }
            ))),
            None => Ok(()),
        }
    }

    fn real(&self, key: &str) -> CliResult<Option<f64>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(ParamValue::Number(x)) if x.is_finite() => Ok(Some(*x)),
            Some(other) => Err(CliError::validation(format!("parameter {key} = {other} must be a finite real number"))),
        }
    }

    fn real_or(&self, key: &str, default: f64) -> CliResult<f64> {
        Ok(self.real(key)?.unwrap_or(default))
    }

    fn required(&self, key: &str) -> CliResult<f64> {
        self.real(key)?.ok_or_else(|| CliError::validation(format!("missing parameter {key}")))
    }

    fn count(&self, key: &str, default: Option<usize>) -> CliResult<usize> {
        match (self.real(key)?, default) {
            (Some(x), _) if x >= 0.0 && x.fract() == 0.0 && x <= 1e6 => Ok(x as usize),
            (Some(x), _) => Err(CliError::validation(format!("parameter {key} = {x} must be a non-negative integer"))),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(CliError::validation(format!("missing parameter {key}"))),
        }
    }

    fn complex_list(&self, key: &str) -> CliResult<Vec<C64>> {
        let one = |v: &ParamValue| match v {
            ParamValue::Number(x) if x.is_finite() => Ok(C64::new(*x, 0.0)),
            ParamValue::Text(s) => parse_complex(s),
            other => Err(CliError::validation(format!("{key}: {other} is not a complex number"))),
        };
        match self.map.get(key) {
            Some(ParamValue::List(items)) => items.iter().map(one).collect(),
            Some(other) => Ok(vec![one(other)?]),
            None => Err(CliError::validation(format!("missing parameter {key}"))),
        }
    }
}

fn build_model(kind: ModelKind, map: &BTreeMap<String, ParamValue>) -> CliResult<Model> {
    let p = Params { map, model: kind };
    match kind {
        ModelKind::Organism => {
            p.reject_unknown(&[])?;
            Ok(Model::Organism)
        }
        ModelKind::Mutation3 => {
            p.reject_unknown(&["h", "h_ratio", "alpha", "k"])?;
            let h0 = MutationParams::critical_strength();
            let h = match (p.real("h")?, p.real("h_ratio")?) {
                (Some(_), Some(_)) => return Err(CliError::validation("give either h or h_ratio, not both")),
                (Some(h), None) => h,
                (None, Some(r)) => r * h0,
                (None, None) => h0,
            };
            let alpha = p.real_or("alpha", 1.0)?;
            if !(alpha > 0.0) {
                return Err(CliError::validation("alpha must be positive"));
            }
            Ok(Model::Mutation3(MutationParams::new(h, alpha, p.count("k", Some(0))?)))
        }
        ModelKind::Multispecies => {
            let example = map.contains_key("t0") || map.contains_key("t1");
            if example {
                p.reject_unknown(&["t0", "t1"])?;
                let profile = SwitchingProfile::new(p.real_or("t0", 0.0)?, p.real_or("t1", 0.0)?);
                let cfg = two_species_example(profile);
                let solution = Box::new(cfg.dressing()?);
                Ok(Model::Multispecies { solution, profile: Some(profile) })
            } else {
                p.reject_unknown(&["a", "b", "m", "k", "l", "h", "alphas", "betas"])?;
                let cfg = MultiSpeciesConfig::new(
                    p.required("a")?,
                    p.required("b")?,
                    p.count("m", None)?,
                    p.count("k", None)?,
                    p.count("l", None)?,
                    p.complex_list("alphas")?,
                    p.complex_list("betas")?,
                    p.required("h")?,
                )?;
                Ok(Model::Multispecies { solution: Box::new(cfg.dressing()?), profile: None })
            }
        }
    }
}

fn check_output(model: &Model, mode: Mode, out: OutputKind) -> CliResult<()> {
    let unsupported = |why: &str| Err(CliError::validation(format!("output {} {why}", out.name())));
    match out {
        OutputKind::Residual if mode == Mode::Integrate => unsupported("needs mode = \"closed-form\""),
        OutputKind::Error if mode == Mode::ClosedForm => unsupported("needs mode = \"integrate\""),
        OutputKind::Reduced | OutputKind::Ppt if matches!(model, Model::Mutation3(_)) => {
            unsupported("needs a bipartite model (organism or multispecies)")
        }
        OutputKind::Density | OutputKind::Xi if !matches!(model, Model::Mutation3(_)) => {
            unsupported("is only defined for mutation3")
        }
        OutputKind::Switching if !matches!(model, Model::Multispecies { profile: Some(_), .. }) => {
            unsupported("needs the multispecies example (params t0, t1)")
        }
        OutputKind::Uncertainty => match model {
            Model::Multispecies { solution, .. } if solution.config().k + 2 * solution.config().m + 1 == 4 => Ok(()),
            _ => unsupported("needs a multispecies model whose first species has four levels"),
        },
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5-2j").unwrap(), c(1.5, -2.0));
        assert_eq!(parse_complex("1+0j").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex(" -3j ").unwrap(), c(0.0, -3.0));
        assert_eq!(parse_complex("j").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-j").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2-j").unwrap(), c(2.0, -1.0));
        assert_eq!(parse_complex("1e-3+2.5e+2j").unwrap(), c(1e-3, 250.0));
        assert_eq!(parse_complex("-1E2-1e-2i").unwrap(), c(-100.0, -0.01));
        assert_eq!(parse_complex("0.25").unwrap(), c(0.25, 0.0));
        for bad in ["", "j1", "1+2", "1+2k", "abc", "1++2j", "infj"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grid_hits_endpoints() {
        let g = time_grid(-10.0, 10.0, 0.01);
        assert_eq!(g.len(), 2001);
        assert_eq!(g[1000], 0.0);
        assert_eq!(*g.last().unwrap(), 10.0);
        let g = time_grid(0.0, 1.0, 0.3);
        assert_eq!(g.len(), 4);
        assert!(*g.last().unwrap() <= 1.0);
    }

    const ORGANISM: &str = r#"
        [scenario]
        model = "organism"
        t_start = -1.0
        t_end = 1.0
        t_step = 0.5
        outputs = ["entropy", "spectrum", "entropy"]
    "#;

    #[test]
    fn parses_and_deduplicates() {
        let s = Scenario::parse(ORGANISM, "org").unwrap();
        assert_eq!(s.name, "org");
        assert_eq!(s.outputs, vec![OutputKind::Spectrum, OutputKind::Entropy]);
        assert_eq!(s.times(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(s.stamp().contains("model=organism"));
    }

    #[test]
    fn validation_failures() {
        let cases = [
            ORGANISM.replace("[\"entropy\", \"spectrum\", \"entropy\"]", "[]"),
            ORGANISM.replace("t_end = 1.0", "t_end = -2.0"),
            ORGANISM.replace("t_step = 0.5", "t_step = 0.0"),
            ORGANISM.replace("\"organism\"", "\"unknown\""),
            ORGANISM.replace("\"spectrum\"", "\"xi\""),
            ORGANISM.to_string() + "\n[params]\nh = 1.0\n",
            ORGANISM.to_string() + "\n[integrator]\ndt = 0.1\n",
            ORGANISM.replace("t_step = 0.5", "t_step = 0.5\nmode = \"integrate\"") + "\n[integrator]\ndt = 0.3\n",
            ORGANISM.replace("t_step = 0.5", "t_step = 0.5\nbogus = 1"),
        ];
        for text in &cases {
            let err = Scenario::parse(text, "x").unwrap_err();
            assert_eq!(err.exit_code(), 2, "{err}");
        }
    }

    #[test]
    fn multispecies_parameters() {
        let base = r#"
            [scenario]
            model = "multispecies"
            t_start = 0.0
            t_end = 1.0
            t_step = 0.5
            outputs = ["switching", "uncertainty"]
        "#;
        let s = Scenario::parse(&format!("{base}\n[params]\nt0 = 150\nt1 = 0\n"), "m").unwrap();
        assert!(matches!(s.model, Model::Multispecies { profile: Some(_), .. }));

        let general = r#"
            [scenario]
            model = "multispecies"
            t_start = 0.0
            t_end = 1.0
            t_step = 0.5
            outputs = ["state", "reduced"]
            [params]
            a = 6
            b = -3.5
            m = 1
            k = 3
            l = 2
            h = 0.6
            alphas = ["1+0.5j", "0.3j", 2]
            betas = ["1-1j", 0.5, "0.2+0.2j"]
        "#;
        let s = Scenario::parse(general, "g").unwrap();
        assert_eq!(s.model.hamiltonian().dim(), 9);
        assert_eq!(s.with_param("h", 0.4).unwrap().model.feedback(), FeedbackPolynomial::quadratic(0.4));
        assert!(s.with_param("alphas", 1.0).is_err());
        assert!(s.with_param("nope", 1.0).is_err());
        assert!(Scenario::parse(&general.replace("b = -3.5", "b = 3.5"), "g").is_err());
        assert!(Scenario::parse(&general.replace("\"state\", ", "\"uncertainty\", "), "g").is_err());
    }

    #[test]
    fn mutation_strength_forms() {
        let base = r#"
            [scenario]
            model = "mutation3"
            t_start = 0.0
            t_end = 1.0
            t_step = 0.5
            outputs = ["xi"]
            [params]
        "#;
        let h0 = MutationParams::critical_strength();
        let strength = |extra: &str| match Scenario::parse(&format!("{base}{extra}"), "m").map(|s| s.model) {
            Ok(Model::Mutation3(p)) => Ok(p.feedback_strength),
            Ok(_) => unreachable!(),
            Err(e) => Err(e),
        };
        assert_eq!(strength("").unwrap(), h0);
        assert_eq!(strength("h_ratio = 2.0").unwrap(), 2.0 * h0);
        assert_eq!(strength("h = 0").unwrap(), 0.0);
        assert!(strength("h = 1\nh_ratio = 1").is_err());
        assert!(strength("alpha = -1").is_err());
        assert!(strength("k = 1.5").is_err());
    }
}
