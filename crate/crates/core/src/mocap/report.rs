use serde::{Deserialize, Serialize};

/// One line of a jump-height results table, mm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub group: String,
    pub h_max_mm: f64,
    pub delta_h_mm: f64,
    /// Sample standard deviation of ΔH, when trials were aggregated.
    pub std_mm: Option<f64>,
    /// `None` for the reference row.
    pub relative_change_pct: Option<f64>,
    /// Short annotation printed after the row.
    pub note: Option<String>,
}

fn pct(v: Option<f64>) -> String {
    match v {
        Some(p) => format!("{p:+.1}%"),
        None => "-".into(),
    }
}

/// Fixed-width text table with Max Height, Eff. Jump Height and Relative
/// Change columns.
pub fn format_table(rows: &[ReportRow]) -> String {
    let mut s = format!(
        "{:<10} {:>16} {:>22} {:>16}\n",
        "Group", "Max Height", "Eff. Jump Height", "Relative Change"
    );
    s.push_str(&"-".repeat(67));
    s.push('\n');
    for r in rows {
        let eff = match r.std_mm {
            Some(sd) => format!("{:.1} ± {:.1} mm", r.delta_h_mm, sd),
            None => format!("{:.1} mm", r.delta_h_mm),
        };
        s.push_str(&format!(
            "{:<10} {:>13.1} mm {:>22} {:>16}",
            r.group,
            r.h_max_mm,
            eff,
            pct(r.relative_change_pct)
        ));
        if let Some(n) = &r.note {
            s.push_str(&format!("  [{n}]"));
        }
        s.push('\n');
    }
    s
}

pub fn table_csv(rows: &[ReportRow]) -> String {
    let mut s = String::from("group,h_max_mm,delta_h_mm,std_mm,relative_change_pct\n");
    for r in rows {
        let opt = |v: Option<f64>, p: usize| v.map(|x| format!("{x:.p$}")).unwrap_or_default();
        s.push_str(&format!(
            "{},{:.3},{:.3},{},{}\n",
            r.group,
            r.h_max_mm,
            r.delta_h_mm,
            opt(r.std_mm, 3),
            opt(r.relative_change_pct, 3)
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_layout() {
        let rows = vec![
            ReportRow {
                group: "Baseline".into(),
                h_max_mm: 656.3,
                delta_h_mm: 373.1,
                std_mm: None,
                relative_change_pct: None,
                note: None,
            },
            ReportRow {
                group: "Deployed".into(),
                h_max_mm: 720.3,
                delta_h_mm: 437.1,
                std_mm: Some(2.0),
                relative_change_pct: Some(17.153),
                note: Some("predicted".into()),
            },
        ];
        let t = format_table(&rows);
        assert!(
            t.contains("Max Height")
                && t.contains("Eff. Jump Height")
                && t.contains("Relative Change")
        );
        assert!(t.contains("+17.2%") && t.contains("[predicted]"));
        let c = table_csv(&rows);
        assert_eq!(c.lines().nth(1).unwrap(), "Baseline,656.300,373.100,,");
    }
}
