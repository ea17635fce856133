//! CSV emission for sweeps. Column order is fixed:
//! `param, value, dim, tail_mass, mean_<label>...`, then per requested
//! order r the four columns `lhs_r, rhs_r, gap_r, saturated_r`, and a
//! trailing `error` column. Floats carry 17 significant digits.

use anyhow::Result;
use charur::search::SweepRow;

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sweep_csv(
    param: &str,
    labels: &[String],
    orders: &[usize],
    rows: &[SweepRow],
) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "param".to_string(),
        "value".into(),
        "dim".into(),
        "tail_mass".into(),
    ];
    for label in labels {
        header.push(format!("mean_{label}"));
    }
    for r in orders {
        header.push(format!("lhs_{r}"));
        header.push(format!("rhs_{r}"));
        header.push(format!("gap_{r}"));
        header.push(format!("saturated_{r}"));
    }
    header.push("error".into());
    wtr.write_record(&header)?;

    for row in rows {
        let mut record = vec![
            param.to_string(),
            fmt_f64(row.value),
            row.dim.to_string(),
            if row.tail_mass.is_nan() {
                String::new()
            } else {
                fmt_f64(row.tail_mass)
            },
        ];
        for i in 0..labels.len() {
            record.push(row.means.get(i).map(|m| fmt_f64(*m)).unwrap_or_default());
        }
        for r in orders {
            match row.orders.iter().find(|o| o.r == *r) {
                Some(o) => {
                    record.push(fmt_f64(o.lhs));
                    record.push(fmt_f64(o.rhs));
                    record.push(fmt_f64(o.gap));
                    record.push(o.saturated.to_string());
                }
                None => record.extend([String::new(), String::new(), String::new(), String::new()]),
            }
        }
        record.push(row.error.clone().unwrap_or_default());
        wtr.write_record(&record)?;
    }
    Ok(String::from_utf8(wtr.into_inner()?)?)
}
