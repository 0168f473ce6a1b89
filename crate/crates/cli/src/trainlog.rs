//! Per-epoch training logs as CSV.
//!
//! Columns: `epoch,l_c,l_adv_n,alpha_l_adv_x,beta_l_g,gamma_l_aux,total`,
//! plus `wall_secs` when timing was requested.

use std::io::Write;

use mgpll_core::train::{EpochRecord, TrainLog};

use crate::error::Result;

const COLUMNS: [&str; 7] = [
    "epoch",
    "l_c",
    "l_adv_n",
    "alpha_l_adv_x",
    "beta_l_g",
    "gamma_l_aux",
    "total",
];

pub fn write_train_log<W: Write>(out: W, log: &TrainLog, with_wall_time: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if with_wall_time {
        header.push("wall_secs");
    }
    w.write_record(&header)?;
    for r in &log.records {
        let mut row = vec![
            r.epoch.to_string(),
            r.l_c.to_string(),
            r.l_adv_n.to_string(),
            r.alpha_l_adv_x.to_string(),
            r.beta_l_g.to_string(),
            r.gamma_l_aux.to_string(),
            r.total.to_string(),
        ];
        if with_wall_time {
            row.push(r.wall_secs.map(|s| s.to_string()).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn render_train_log(log: &TrainLog, with_wall_time: bool) -> Result<String> {
    let mut buf = Vec::new();
    write_train_log(&mut buf, log, with_wall_time)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Reads a log written by [`write_train_log`]. `stopped_early` is not stored
/// and comes back `false`.
pub fn parse_train_log(text: &str) -> Result<TrainLog> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let timed = r.headers()?.len() == COLUMNS.len() + 1;
    let mut records = Vec::new();
    for row in r.records() {
        let row = row?;
        let num = |i: usize| -> Result<f64> {
            row[i].parse().map_err(|_| {
                crate::error::CliError::Config(format!("bad number {:?} in train log", &row[i]))
            })
        };
        records.push(EpochRecord {
            epoch: num(0)? as usize,
            l_c: num(1)?,
            l_adv_n: num(2)?,
            alpha_l_adv_x: num(3)?,
            beta_l_g: num(4)?,
            gamma_l_aux: num(5)?,
            total: num(6)?,
            wall_secs: if timed && !row[7].is_empty() {
                Some(num(7)?)
            } else {
                None
            },
        });
    }
    Ok(TrainLog {
        records,
        stopped_early: false,
    })
}
