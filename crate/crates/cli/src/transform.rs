use std::io::{Read, Write};

use clap::ValueEnum;
use csv::{ReaderBuilder, StringRecord, Trim, WriterBuilder};

use countcomp::simplex::{
    log_det_jacobian_log_ratio_inverse, log_det_jacobian_ratio_inverse, log_ratio_forward,
    log_ratio_inverse, ratio_forward, ratio_inverse, Composition, LogRatioVector, RatioVector,
};

use crate::{fmt_f64, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChartArg {
    Ratio,
    Alr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Forward,
    Inverse,
}

fn numeric_row(record: &StringRecord) -> Option<Vec<f64>> {
    record.iter().map(|f| f.parse::<f64>().ok()).collect()
}

/// Maps one row; returns the image and the log-|det| of the map applied.
fn map_row(chart: ChartArg, direction: Direction, row: Vec<f64>) -> countcomp::Result<(Vec<f64>, f64)> {
    Ok(match (chart, direction) {
        (ChartArg::Ratio, Direction::Forward) => {
            let y = ratio_forward(&Composition::new(row)?);
            let jac = -log_det_jacobian_ratio_inverse(&y);
            (y.entries().to_vec(), jac)
        }
        (ChartArg::Alr, Direction::Forward) => {
            let y = log_ratio_forward(&Composition::new(row)?);
            let jac = -log_det_jacobian_log_ratio_inverse(&y);
            (y.entries().to_vec(), jac)
        }
        (ChartArg::Ratio, Direction::Inverse) => {
            let y = RatioVector::new(row)?;
            (ratio_inverse(&y)?.into_vec(), log_det_jacobian_ratio_inverse(&y))
        }
        (ChartArg::Alr, Direction::Inverse) => {
            let y = LogRatioVector::new(row)?;
            (log_ratio_inverse(&y)?.into_vec(), log_det_jacobian_log_ratio_inverse(&y))
        }
    })
}

pub fn run<R: Read, W: Write>(
    chart: ChartArg,
    direction: Direction,
    jacobian: bool,
    input: R,
    output: W,
) -> Result<(), CliError> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .trim(Trim::All)
        .from_reader(input);
    let mut writer = WriterBuilder::new().from_writer(output);
    let mut header_written = false;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Usage(format!("malformed CSV: {e}")))?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        let row = match numeric_row(&record) {
            Some(row) => row,
            None if i == 0 => continue,
            None => {
                return Err(CliError::Usage(format!("line {line}: non-numeric field")));
            }
        };
        let (image, jac) = map_row(chart, direction, row)
            .map_err(|e| CliError::Failure(format!("line {line}: {e}")))?;
        if !header_written {
            let prefix = if direction == Direction::Forward { "y" } else { "x" };
            let mut names: Vec<String> = (1..=image.len()).map(|j| format!("{prefix}{j}")).collect();
            if jacobian {
                names.push("log_jacobian".into());
            }
            writer.write_record(&names).map_err(CliError::io)?;
            header_written = true;
        }
        let mut fields: Vec<String> = image.iter().map(|&v| fmt_f64(v)).collect();
        if jacobian {
            fields.push(fmt_f64(jac));
        }
        writer.write_record(&fields).map_err(CliError::io)?;
    }
    writer.flush().map_err(CliError::io)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(chart: ChartArg, direction: Direction, jacobian: bool, input: &str) -> Result<String, CliError> {
        let mut out = Vec::new();
        run(chart, direction, jacobian, input.as_bytes(), &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    #[test]
    fn header_is_detected() {
        let with = run_str(ChartArg::Alr, Direction::Forward, false, "a,b\n0.5,0.5\n").unwrap();
        let without = run_str(ChartArg::Alr, Direction::Forward, false, "0.5,0.5\n").unwrap();
        assert_eq!(with, "y1\n0.0\n");
        assert_eq!(with, without);
    }

    #[test]
    fn bad_rows_report_their_line() {
        match run_str(ChartArg::Ratio, Direction::Forward, false, "0.5,0.5\n0.5,0.6\n") {
            Err(CliError::Failure(msg)) => assert!(msg.starts_with("line 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            run_str(ChartArg::Ratio, Direction::Forward, false, "0.5,0.5\nx,0.5\n"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            run_str(ChartArg::Ratio, Direction::Forward, false, "0.5,0.5\n0.2,0.3,0.5\n"),
            Err(CliError::Usage(_))
        ));
    }
}
