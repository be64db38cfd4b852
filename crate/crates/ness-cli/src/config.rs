//! Flat `key=value` run configuration.
//!
//! One pair per line, `#` starts a comment, blank lines are ignored.
//! Unknown keys, duplicates, type errors, and missing required keys are
//! reported with their line number (line 0 for missing keys).

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Task {
    #[value(name = "steady-state")]
    SteadyState,
    #[value(name = "metric")]
    Metric,
    #[value(name = "gap")]
    Gap,
    #[value(name = "scaling")]
    Scaling,
    #[value(name = "phase-diagram")]
    PhaseDiagram,
    #[value(name = "oracle-check")]
    OracleCheck,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::SteadyState => "steady-state",
            Task::Metric => "metric",
            Task::Gap => "gap",
            Task::Scaling => "scaling",
            Task::PhaseDiagram => "phase-diagram",
            Task::OracleCheck => "oracle-check",
        }
    }

    fn parse(s: &str, line: usize) -> Result<Task, ConfigError> {
        match s {
            "steady-state" => Ok(Task::SteadyState),
            "metric" => Ok(Task::Metric),
            "gap" => Ok(Task::Gap),
            "scaling" => Ok(Task::Scaling),
            "phase-diagram" => Ok(Task::PhaseDiagram),
            "oracle-check" => Ok(Task::OracleCheck),
            other => Err(err(line, format!("unknown task `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    XyBoundary,
    RingNumeric,
    RingAnalytic,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::XyBoundary => "xy_boundary",
            ModelKind::RingNumeric => "ring_numeric",
            ModelKind::RingAnalytic => "ring_analytic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelKind,
    pub task: Task,
    pub n: usize,
    pub n_list: Vec<usize>,
    pub h: f64,
    pub gamma: f64,
    pub gl_plus: f64,
    pub gl_minus: f64,
    pub gr_plus: f64,
    pub gr_minus: f64,
    pub mu: f64,
    pub nu: f64,
    pub epsilon: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub h_steps: usize,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_steps: usize,
    pub out: Option<String>,
    pub format: OutputFormat,
    pub seed: u64,
    pub workers: usize,
}

const KNOWN_KEYS: &[&str] = &[
    "model",
    "task",
    "n",
    "n_list",
    "h",
    "gamma",
    "gl_plus",
    "gl_minus",
    "gr_plus",
    "gr_minus",
    "mu",
    "nu",
    "epsilon",
    "h_min",
    "h_max",
    "h_steps",
    "gamma_min",
    "gamma_max",
    "gamma_steps",
    "out",
    "format",
    "seed",
    "workers",
];

struct RawConfig {
    entries: BTreeMap<&'static str, (String, usize)>,
}

impl RawConfig {
    fn get(&self, key: &str) -> Option<&(String, usize)> {
        self.entries.get(key)
    }

    fn required(&self, key: &'static str) -> Result<&(String, usize), ConfigError> {
        self.get(key)
            .ok_or_else(|| err(0, format!("missing required key: {key}")))
    }

    fn parse_f64_or(&self, key: &'static str, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some((raw, line)) => raw
                .parse::<f64>()
                .map_err(|_| err(*line, format!("key {key}: `{raw}` is not a number"))),
        }
    }

    fn parse_usize(&self, key: &'static str) -> Result<usize, ConfigError> {
        let (raw, line) = self.required(key)?;
        parse_usize_value(key, raw, *line)
    }

    fn parse_usize_or(&self, key: &'static str, default: usize) -> Result<usize, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some((raw, line)) => parse_usize_value(key, raw, *line),
        }
    }
}

fn parse_usize_value(key: &str, raw: &str, line: usize) -> Result<usize, ConfigError> {
    raw.parse::<usize>().map_err(|_| {
        err(
            line,
            format!("key {key}: `{raw}` is not a non-negative integer"),
        )
    })
}

/// Parses the raw text plus command-line overrides (`--param key=value`,
/// applied in order after the file).
pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut entries: BTreeMap<&'static str, (String, usize)> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let stripped = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        let stripped = stripped.trim();
        if stripped.is_empty() {
            continue;
        }
        let (key, value) = stripped
            .split_once('=')
            .ok_or_else(|| err(line_no, format!("expected key=value, got `{stripped}`")))?;
        let key = key.trim();
        let value = value.trim();
        let known = KNOWN_KEYS
            .iter()
            .find(|&&k| k == key)
            .ok_or_else(|| err(line_no, format!("unknown key `{key}`")))?;
        if entries.contains_key(known) {
            return Err(err(line_no, format!("duplicate key `{key}`")));
        }
        entries.insert(known, (value.to_string(), line_no));
    }
    for (idx, over) in overrides.iter().enumerate() {
        let (key, value) = over
            .split_once('=')
            .ok_or_else(|| err(0, format!("--param expects key=value, got `{over}`")))?;
        let key = key.trim();
        let known = KNOWN_KEYS
            .iter()
            .find(|&&k| k == key)
            .ok_or_else(|| err(0, format!("unknown override key `{key}`")))?;
        // Overrides replace file entries; line 0 marks command-line origin.
        entries.insert(known, (value.trim().to_string(), 1000 + idx));
    }
    build(RawConfig { entries })
}

fn build(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    let (model_raw, model_line) = raw.required("model")?;
    let model = match model_raw.as_str() {
        "xy_boundary" => ModelKind::XyBoundary,
        "ring_numeric" => ModelKind::RingNumeric,
        "ring_analytic" => ModelKind::RingAnalytic,
        other => return Err(err(*model_line, format!("unknown model `{other}`"))),
    };
    let (task_raw, task_line) = raw.required("task")?;
    let task = Task::parse(task_raw, *task_line)?;

    let needs_grid = task == Task::PhaseDiagram;
    let needs_sizes = task == Task::Scaling;

    let n_list = match raw.get("n_list") {
        Some((rawv, line)) => {
            let mut out = Vec::new();
            for piece in rawv.split(',') {
                out.push(parse_usize_value("n_list", piece.trim(), *line)?);
            }
            if out.windows(2).any(|w| w[1] <= w[0]) {
                return Err(err(*line, "n_list must be strictly increasing"));
            }
            out
        }
        None => Vec::new(),
    };
    if needs_sizes && n_list.len() < 4 {
        return Err(err(
            0,
            "task scaling needs n_list with at least 4 strictly increasing sizes",
        ));
    }
    let n = if needs_sizes {
        raw.parse_usize_or("n", *n_list.last().unwrap_or(&0))?
    } else if task == Task::OracleCheck {
        raw.parse_usize_or("n", 2)?
    } else {
        raw.parse_usize("n")?
    };
    if n == 0 {
        return Err(err(
            raw.get("n").map(|e| e.1).unwrap_or(0),
            "n must be positive",
        ));
    }

    let h = raw.parse_f64_or("h", 0.0)?;
    let gamma = raw.parse_f64_or("gamma", 0.0)?;
    if !needs_grid && task != Task::OracleCheck && raw.get("h").is_none() {
        return Err(err(0, "missing required key: h"));
    }
    if !needs_grid && task != Task::OracleCheck && raw.get("gamma").is_none() {
        return Err(err(0, "missing required key: gamma"));
    }

    let mut cfg = RunConfig {
        model,
        task,
        n,
        n_list,
        h,
        gamma,
        gl_plus: raw.parse_f64_or("gl_plus", 0.0)?,
        gl_minus: raw.parse_f64_or("gl_minus", 0.0)?,
        gr_plus: raw.parse_f64_or("gr_plus", 0.0)?,
        gr_minus: raw.parse_f64_or("gr_minus", 0.0)?,
        mu: raw.parse_f64_or("mu", 0.0)?,
        nu: raw.parse_f64_or("nu", 0.0)?,
        epsilon: raw.parse_f64_or("epsilon", 1e-3)?,
        h_min: raw.parse_f64_or("h_min", 0.0)?,
        h_max: raw.parse_f64_or("h_max", 0.0)?,
        h_steps: raw.parse_usize_or("h_steps", 0)?,
        gamma_min: raw.parse_f64_or("gamma_min", 0.0)?,
        gamma_max: raw.parse_f64_or("gamma_max", 0.0)?,
        gamma_steps: raw.parse_usize_or("gamma_steps", 0)?,
        out: raw.get("out").map(|(v, _)| v.clone()),
        format: match raw.get("format") {
            None => match task {
                Task::PhaseDiagram => OutputFormat::Csv,
                _ => OutputFormat::Json,
            },
            Some((v, line)) => match v.as_str() {
                "csv" => OutputFormat::Csv,
                "json" => OutputFormat::Json,
                other => return Err(err(*line, format!("unknown format `{other}`"))),
            },
        },
        seed: raw.parse_usize_or("seed", 0).map(|v| v as u64)?,
        workers: raw.parse_usize_or("workers", 0)?,
    };

    match model {
        ModelKind::XyBoundary => {
            for key in ["gl_plus", "gl_minus", "gr_plus", "gr_minus"] {
                if raw.get(key).is_none() && task != Task::OracleCheck {
                    return Err(err(0, format!("missing required key: {key}")));
                }
            }
            for (key, v) in [
                ("gl_plus", cfg.gl_plus),
                ("gl_minus", cfg.gl_minus),
                ("gr_plus", cfg.gr_plus),
                ("gr_minus", cfg.gr_minus),
            ] {
                if v < 0.0 {
                    return Err(err(
                        raw.get(key).map(|e| e.1).unwrap_or(0),
                        format!("rate {key} must be >= 0, got {v}"),
                    ));
                }
            }
        }
        ModelKind::RingNumeric | ModelKind::RingAnalytic => {
            for key in ["mu", "nu"] {
                if raw.get(key).is_none() {
                    return Err(err(0, format!("missing required key: {key}")));
                }
            }
            if cfg.mu * cfg.mu + cfg.nu * cfg.nu <= 0.0 {
                return Err(err(0, "mu and nu must not both vanish"));
            }
            if model == ModelKind::RingNumeric && cfg.epsilon <= 0.0 {
                return Err(err(
                    raw.get("epsilon").map(|e| e.1).unwrap_or(0),
                    "epsilon must be positive",
                ));
            }
            if model == ModelKind::RingAnalytic
                && matches!(task, Task::Gap | Task::PhaseDiagram | Task::OracleCheck)
            {
                return Err(err(
                    *task_line,
                    format!("task {} is not defined for ring_analytic", task.as_str()),
                ));
            }
        }
    }
    if model != ModelKind::XyBoundary && task == Task::OracleCheck {
        return Err(err(
            *task_line,
            "oracle-check runs on the xy_boundary model",
        ));
    }
    if needs_grid {
        if cfg.h_steps < 2 || cfg.gamma_steps < 2 {
            return Err(err(
                0,
                "phase-diagram needs h_steps >= 2 and gamma_steps >= 2",
            ));
        }
        if cfg.h_max < cfg.h_min || cfg.gamma_max < cfg.gamma_min {
            return Err(err(0, "grid ranges must satisfy min <= max"));
        }
    }
    // Resolve unused-but-set n for scaling: keep n_list authoritative.
    if needs_sizes {
        cfg.n = *cfg.n_list.last().unwrap();
    }
    Ok(cfg)
}

/// Deterministic echo of the resolved configuration for the run record.
pub fn echo_config(cfg: &RunConfig) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = vec![
        ("model".into(), cfg.model.as_str().into()),
        ("task".into(), cfg.task.as_str().into()),
        ("n".into(), cfg.n.to_string()),
        ("h".into(), format!("{}", cfg.h)),
        ("gamma".into(), format!("{}", cfg.gamma)),
        ("format".into(), cfg.format.as_str().into()),
        ("seed".into(), cfg.seed.to_string()),
    ];
    if !cfg.n_list.is_empty() {
        let list: Vec<String> = cfg.n_list.iter().map(|n| n.to_string()).collect();
        out.push(("n_list".into(), list.join(",")));
    }
    match cfg.model {
        ModelKind::XyBoundary => {
            out.push(("gl_plus".into(), format!("{}", cfg.gl_plus)));
            out.push(("gl_minus".into(), format!("{}", cfg.gl_minus)));
            out.push(("gr_plus".into(), format!("{}", cfg.gr_plus)));
            out.push(("gr_minus".into(), format!("{}", cfg.gr_minus)));
        }
        _ => {
            out.push(("mu".into(), format!("{}", cfg.mu)));
            out.push(("nu".into(), format!("{}", cfg.nu)));
            out.push(("epsilon".into(), format!("{}", cfg.epsilon)));
        }
    }
    if cfg.task == Task::PhaseDiagram {
        out.push(("h_min".into(), format!("{}", cfg.h_min)));
        out.push(("h_max".into(), format!("{}", cfg.h_max)));
        out.push(("h_steps".into(), cfg.h_steps.to_string()));
        out.push(("gamma_min".into(), format!("{}", cfg.gamma_min)));
        out.push(("gamma_max".into(), format!("{}", cfg.gamma_max)));
        out.push(("gamma_steps".into(), cfg.gamma_steps.to_string()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const VALID: &str = "model=xy_boundary\ntask=gap\nn=20\nh=0.5\ngamma=0.5\n\
gl_plus=0.3\ngl_minus=0.5\ngr_plus=0.1\ngr_minus=0.5\n";

    #[test]
    fn valid_reference_config_parses() {
        let cfg = parse_config(VALID, &[]).unwrap();
        assert_eq!(cfg.model, ModelKind::XyBoundary);
        assert_eq!(cfg.task, Task::Gap);
        assert_eq!(cfg.n, 20);
        assert_eq!(cfg.gl_plus, 0.3);
        assert_eq!(cfg.format, OutputFormat::Json);
    }

    #[test]
    fn empty_input_reports_missing_model_at_line_zero() {
        let e = parse_config("", &[]).unwrap_err();
        assert_eq!(e.line, 0);
        assert!(e.message.contains("missing required key: model"));
    }

    #[test]
    fn negative_n_reports_key_and_line() {
        let text = VALID.replace("n=20", "n=-3");
        let e = parse_config(&text, &[]).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("key n"));
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected_with_lines() {
        let e = parse_config("model=xy_boundary\nbogus=1\n", &[]).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("unknown key `bogus`"));
        let e = parse_config("model=xy_boundary\nmodel=ring_numeric\n", &[]).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("duplicate"));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# run configuration\n\n{VALID}# trailing comment\n");
        assert!(parse_config(&text, &[]).is_ok());
    }

    #[test]
    fn overrides_replace_file_values() {
        let cfg = parse_config(VALID, &["h=1.25".to_string()]).unwrap();
        assert_eq!(cfg.h, 1.25);
        let e = parse_config(VALID, &["bogus=1".to_string()]).unwrap_err();
        assert!(e.message.contains("unknown override key"));
    }

    #[test]
    fn scaling_requires_a_size_list() {
        let text = VALID.replace("task=gap", "task=scaling");
        let e = parse_config(&text, &[]).unwrap_err();
        assert!(e.message.contains("n_list"));
        let text = format!("{}n_list=10,20,30,40\n", text);
        let cfg = parse_config(&text, &[]).unwrap();
        assert_eq!(cfg.n_list, vec![10, 20, 30, 40]);
        assert_eq!(cfg.n, 40);
    }

    #[test]
    fn ring_analytic_rejects_undefined_tasks() {
        let text = "model=ring_analytic\ntask=gap\nn=8\nh=0.5\ngamma=0.5\nmu=1\nnu=0.5\n";
        let e = parse_config(text, &[]).unwrap_err();
        assert!(e.message.contains("not defined for ring_analytic"));
    }
}
