use std::fmt::Write as _;

/// Mean over seeds, with the sample standard deviation when there are at least two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: Option<f64>,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = (n >= 2).then(|| {
            let ss = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
            (ss / (n - 1) as f64).sqrt()
        });
        Self { mean, std }
    }

    /// `0.8131 (±0.0008)`, or just the mean for a single seed.
    pub fn display(&self) -> String {
        match self.std {
            Some(s) => format!("{:.4} (±{:.4})", self.mean, s),
            None => format!("{:.4}", self.mean),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub model: String,
    pub r2: Summary,
    pub rmse: Summary,
    /// `(r2, rmse)` for each seed, in seed order.
    pub per_seed: Vec<(f64, f64)>,
}

impl ReportRow {
    pub fn from_runs(model: &str, per_seed: Vec<(f64, f64)>) -> Self {
        let r2: Vec<f64> = per_seed.iter().map(|p| p.0).collect();
        let rmse: Vec<f64> = per_seed.iter().map(|p| p.1).collect();
        Self {
            model: model.to_owned(),
            r2: Summary::of(&r2),
            rmse: Summary::of(&rmse),
            per_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub title: String,
    pub seeds: Vec<u64>,
    pub config_fingerprint: u64,
    pub dataset_fingerprint: u64,
    pub rows: Vec<ReportRow>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|s| format!("{s:.6}")).unwrap_or_default()
}

impl EvalReport {
    pub fn row(&self, model: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.model == model)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "model,r2_mean,r2_std,rmse_mean,rmse_std,seeds,config_fingerprint,dataset_fingerprint\n",
        );
        let seeds = self.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.6},{},{:.6},{},{},{:016x},{:016x}",
                csv_field(&r.model),
                r.r2.mean,
                opt(r.r2.std),
                r.rmse.mean,
                opt(r.rmse.std),
                seeds,
                self.config_fingerprint,
                self.dataset_fingerprint
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let seeds = self.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(", ");
        let mut out = format!(
            "{}\nseeds: {seeds}\nconfig: {:016x}  dataset: {:016x}\n\n",
            self.title, self.config_fingerprint, self.dataset_fingerprint
        );
        let cells: Vec<[String; 3]> = self
            .rows
            .iter()
            .map(|r| [r.model.clone(), r.r2.display(), r.rmse.display()])
            .collect();
        let header = ["Model", "R²", "RMSE"];
        let width = |c: usize| {
            cells
                .iter()
                .map(|row| row[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap_or(0)
        };
        let (w0, w1, w2) = (width(0), width(1), width(2));
        let line = |a: &str, b: &str, c: &str| format!("{a:<w0$}  {b:>w1$}  {c:>w2$}\n");
        out += &line(header[0], header[1], header[2]);
        out += &line(&"-".repeat(w0), &"-".repeat(w1), &"-".repeat(w2));
        for [a, b, c] in &cells {
            out += &line(a, b, c);
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Test-set predictions of one model, for plotting predicted against true activity.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionCurve {
    pub model: String,
    pub truth: Vec<f64>,
    pub prediction: Vec<f64>,
}

impl PredictionCurve {
    /// `(rank, truth, prediction)` sorted by truth; rank starts at 1.
    pub fn ranked(&self) -> Vec<(usize, f64, f64)> {
        let mut order: Vec<usize> = (0..self.truth.len()).collect();
        order.sort_by(|&a, &b| self.truth[a].total_cmp(&self.truth[b]).then(a.cmp(&b)));
        order
            .into_iter()
            .enumerate()
            .map(|(r, i)| (r + 1, self.truth[i], self.prediction[i]))
            .collect()
    }
}

pub fn curves_to_csv(curves: &[PredictionCurve]) -> String {
    let mut out = String::from("rank,truth,prediction,model\n");
    for c in curves {
        for (rank, t, p) in c.ranked() {
            let _ = writeln!(out, "{rank},{t:.6},{p:.6},{}", csv_field(&c.model));
        }
    }
    out
}
