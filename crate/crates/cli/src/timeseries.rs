//! CSV time series files. One file carries any number of profiles as
//! `name.forecast` / `name.nowcast` columns next to a leading `step` column.

use std::path::Path;

use rigsim::model::{Profile, TimeSeriesSet};

use crate::error::{io_at, CliError};

enum Column {
    Step,
    Forecast(String),
    Nowcast(String),
}

fn parse_header(path: &Path, headers: &csv::StringRecord) -> Result<Vec<Column>, CliError> {
    let mut columns = Vec::new();
    let mut seen: Vec<&str> = Vec::new();
    for (i, name) in headers.iter().enumerate() {
        let name = name.trim();
        if seen.contains(&name) {
            return Err(CliError::User(format!(
                "{}: column '{}' appears more than once",
                path.display(),
                name
            )));
        }
        seen.push(name);
        if i == 0 {
            if name != "step" {
                return Err(CliError::User(format!(
                    "{}: first column must be 'step', found '{}'",
                    path.display(),
                    name
                )));
            }
            columns.push(Column::Step);
            continue;
        }
        match name.rsplit_once('.') {
            Some((id, "forecast")) if !id.is_empty() => columns.push(Column::Forecast(id.to_string())),
            Some((id, "nowcast")) if !id.is_empty() => columns.push(Column::Nowcast(id.to_string())),
            _ => {
                return Err(CliError::User(format!(
                    "{}: column '{}' is not of the form 'name.forecast' or 'name.nowcast'",
                    path.display(),
                    name
                )))
            }
        }
    }
    Ok(columns)
}

/// Load every profile defined by a CSV file. Rows must carry consecutive
/// step numbers starting at 0 and nonnegative values.
pub fn load_timeseries(path: &Path) -> Result<TimeSeriesSet, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => CliError::Io(format!("{}: {e}", path.display())),
        _ => CliError::User(format!("{}: {e}", path.display())),
    })?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::User(format!("{}: {e}", path.display())))?
        .clone();
    let columns = parse_header(path, &headers)?;

    let mut series: Vec<Vec<f64>> = vec![Vec::new(); columns.len()];
    for (row_index, record) in reader.records().enumerate() {
        // header is line 1, first record line 2
        let line = row_index + 2;
        let record = record.map_err(|e| CliError::User(format!("{}: line {line}: {e}", path.display())))?;
        if record.len() != columns.len() {
            return Err(CliError::User(format!(
                "{}: line {line}: expected {} fields, found {}",
                path.display(),
                columns.len(),
                record.len()
            )));
        }
        for (i, field) in record.iter().enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| {
                CliError::User(format!(
                    "{}: line {line}: '{}' is not a number",
                    path.display(),
                    field
                ))
            })?;
            match &columns[i] {
                Column::Step => {
                    if value != row_index as f64 {
                        return Err(CliError::User(format!(
                            "{}: line {line}: step {} out of order, expected {}",
                            path.display(),
                            field,
                            row_index
                        )));
                    }
                }
                _ => {
                    if value < 0.0 {
                        return Err(CliError::User(format!(
                            "{}: line {line}: profile values must be nonnegative, found {}",
                            path.display(),
                            field
                        )));
                    }
                }
            }
            series[i].push(value);
        }
    }

    let mut set = TimeSeriesSet::new();
    for (column, values) in columns.iter().zip(series) {
        match column {
            Column::Step => {}
            Column::Forecast(id) => {
                set.entry(id.clone()).or_insert_with(Profile::default).forecast = values;
            }
            Column::Nowcast(id) => {
                set.entry(id.clone()).or_insert_with(Profile::default).nowcast = Some(values);
            }
        }
    }
    Ok(set)
}

/// Write profiles back out in the same column layout, forecast before
/// nowcast per profile, profiles in name order.
pub fn write_timeseries(path: &Path, set: &TimeSeriesSet) -> Result<(), CliError> {
    let steps = set
        .values()
        .map(|p| p.forecast.len().max(p.nowcast.as_ref().map_or(0, Vec::len)))
        .max()
        .unwrap_or(0);
    let mut writer = csv::Writer::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(inner) => CliError::Io(format!("{}: {inner}", path.display())),
        _ => CliError::Io(format!("{}: {e}", path.display())),
    })?;

    let mut header = vec!["step".to_string()];
    for (id, profile) in set {
        if !profile.forecast.is_empty() {
            header.push(format!("{id}.forecast"));
        }
        if profile.nowcast.is_some() {
            header.push(format!("{id}.nowcast"));
        }
    }
    writer.write_record(&header).map_err(|e| CliError::Io(e.to_string()))?;

    for t in 0..steps {
        let mut row = vec![t.to_string()];
        for profile in set.values() {
            if !profile.forecast.is_empty() {
                row.push(profile.forecast.get(t).map_or(String::new(), |v| format!("{v}")));
            }
            if let Some(nowcast) = &profile.nowcast {
                row.push(nowcast.get(t).map_or(String::new(), |v| format!("{v}")));
            }
        }
        writer.write_record(&row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    writer.flush().map_err(|e| io_at(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write as _;
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file
    }

    #[test]
    fn loads_forecast_and_nowcast_columns() {
        let file = write("step,wind.forecast,wind.nowcast,load.forecast\n0,0.5,0.52,1\n1,0.6,0.58,1\n");
        let set = load_timeseries(file.path()).unwrap();
        let wind = &set["wind"];
        assert_eq!(wind.forecast, vec![0.5, 0.6]);
        assert_eq!(wind.nowcast.as_ref().unwrap(), &vec![0.52, 0.58]);
        assert_eq!(set["load"].nowcast, None);
    }

    #[test]
    fn rejects_malformed_rows_with_line_numbers() {
        let ragged = write("step,wind.forecast\n0,0.5\n1\n");
        let err = load_timeseries(ragged.path()).unwrap_err();
        assert!(err.record().contains("line 3"), "{}", err.record());

        let text = write("step,wind.forecast\n0,high\n");
        let err = load_timeseries(text.path()).unwrap_err();
        assert!(err.record().contains("not a number"));

        let negative = write("step,wind.forecast\n0,-0.1\n");
        let err = load_timeseries(negative.path()).unwrap_err();
        assert!(err.record().contains("nonnegative"));

        let misordered = write("step,wind.forecast\n1,0.5\n");
        let err = load_timeseries(misordered.path()).unwrap_err();
        assert!(err.record().contains("out of order"));
    }

    #[test]
    fn rejects_unrecognized_columns() {
        let file = write("step,wind\n0,0.5\n");
        let err = load_timeseries(file.path()).unwrap_err();
        assert!(err.record().contains("name.forecast"));

        let dup = write("step,w.forecast,w.forecast\n0,0.5,0.5\n");
        let err = load_timeseries(dup.path()).unwrap_err();
        assert!(err.record().contains("more than once"));
    }

    #[test]
    fn round_trips_through_the_writer() {
        let mut set = TimeSeriesSet::new();
        set.insert(
            "wind".to_string(),
            Profile {
                forecast: vec![0.123456789012345, 0.5],
                nowcast: Some(vec![0.2, 0.4]),
            },
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        write_timeseries(&path, &set).unwrap();
        let back = load_timeseries(&path).unwrap();
        assert_eq!(back, set);
    }
}
