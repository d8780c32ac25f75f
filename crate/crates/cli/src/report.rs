//! CSV and aligned-text renderings of command outputs.

use std::fmt::Write;

use featcov::{GenerationRecord, KProfile};

use crate::commands::MetricComparison;

pub fn profile_csv(p: &KProfile) -> String {
    let mut s = String::from("r,k_hat,k_poisson\n");
    for ((r, k), kp) in p.radii.iter().zip(&p.k_hat).zip(&p.k_poisson) {
        writeln!(s, "{r},{k},{kp}").unwrap();
    }
    s
}

pub fn history_csv(history: &[GenerationRecord]) -> String {
    let mut s = String::from("generation,best_alpha,selected_count\n");
    for h in history {
        writeln!(s, "{},{},{}", h.generation, h.best_alpha, h.selected_count).unwrap();
    }
    s
}

fn grid_text(title: &str, counts: &[Vec<usize>]) -> String {
    let width = counts
        .iter()
        .flatten()
        .map(|c| c.to_string().len())
        .max()
        .unwrap_or(1);
    let mut s = format!("{title}\n");
    // top image row first
    for row in counts.iter().rev() {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        writeln!(s, "  {}", cells.join(" ")).unwrap();
    }
    s
}

/// Before/after tile counts, rows printed top to bottom of the image
/// (largest y first).
pub fn grid_block(before: &[Vec<usize>], after: &[Vec<usize>]) -> String {
    format!(
        "{}\n{}",
        grid_text("original", before),
        grid_text("refined", after)
    )
}

fn sci(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:.4E}")
    } else {
        format!("{v:.4}")
    }
}

pub fn stats_text(rows: &[MetricComparison]) -> String {
    let mut s = String::new();
    for (i, m) in rows.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let t = &m.t_test;
        writeln!(s, "{}", m.metric).unwrap();
        writeln!(s, "{:<22}{:>16}{:>16}", "", "Original Set", "Refined Set").unwrap();
        writeln!(s, "{:<22}{:>16.4}{:>16.4}", "mean", m.original.mean, m.refined.mean).unwrap();
        writeln!(s, "{:<22}{:>16.4}{:>16.4}", "sd", m.original.sd, m.refined.sd).unwrap();
        writeln!(s, "{:<22}{:>16}{:>16}", "Observations", m.original.n, m.refined.n).unwrap();
        writeln!(s, "{:<22}{:>16}", "df", sci(t.df)).unwrap();
        writeln!(s, "{:<22}{:>16}", "t Stat", sci(t.t_stat)).unwrap();
        writeln!(s, "{:<22}{:>16}", "P(T<=t) one-tail", sci(t.p_one_tail)).unwrap();
        writeln!(s, "{:<22}{:>16}", "t Critical one-tail", sci(t.t_crit_one)).unwrap();
        writeln!(s, "{:<22}{:>16}", "P(T<=t) two-tail", sci(t.p_two_tail)).unwrap();
        writeln!(s, "{:<22}{:>16}", "t Critical two-tail", sci(t.t_crit_two)).unwrap();
        if let Some(mc) = &m.mcnemar {
            writeln!(s, "{:<22}{:>16}", "McNemar b", mc.b).unwrap();
            writeln!(s, "{:<22}{:>16}", "McNemar c", mc.c).unwrap();
            writeln!(s, "{:<22}{:>16}", "McNemar z", sci(mc.z)).unwrap();
        }
    }
    s
}

pub fn stats_csv(rows: &[MetricComparison]) -> String {
    let mut s = String::from(
        "metric,mean_original,sd_original,n_original,mean_refined,sd_refined,n_refined,\
         t_stat,df,p_one_tail,t_crit_one,p_two_tail,t_crit_two,mcnemar_b,mcnemar_c,mcnemar_z\n",
    );
    for m in rows {
        let t = &m.t_test;
        let mc = m
            .mcnemar
            .map(|r| format!("{},{},{}", r.b, r.c, r.z))
            .unwrap_or_else(|| ",,".into());
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            m.metric,
            m.original.mean,
            m.original.sd,
            m.original.n,
            m.refined.mean,
            m.refined.sd,
            m.refined.n,
            t.t_stat,
            t.df,
            t.p_one_tail,
            t.t_crit_one,
            t.p_two_tail,
            t.t_crit_two,
            mc
        )
        .unwrap();
    }
    s
}
