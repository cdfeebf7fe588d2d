//! CSV ingestion for the two supported datasets.
//!
//! Both loaders register users and items from every well-formed row, but only
//! store explicit ratings: the Jester sentinel 99 and BookCrossing's implicit
//! rating 0 mark "no rating" and are skipped. A leading header row is skipped
//! when the rating field of the first row does not parse as a number.

use std::path::Path;

use super::{DataError, MatrixBuilder, RatingMatrix, RatingScale};

/// Jester sentinel for a missing rating in the raw dumps.
const JESTER_MISSING: f64 = 99.0;

/// Load a Jester-normalized CSV: comma-separated `user,item,rating` rows,
/// ratings on the continuous scale -10.0..=+10.0.
pub fn load_jester(path: &Path) -> Result<RatingMatrix, DataError> {
    let scale = RatingScale::new(-10.0, 10.0)?;
    let mut builder = MatrixBuilder::new(scale);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(csv_to_data_error)?;

    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(csv_to_data_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 3 {
            return Err(DataError::Parse {
                line,
                message: format!("expected 3 fields `user,item,rating`, got {}", record.len()),
            });
        }
        let (user, item, raw) = (record[0].trim(), record[1].trim(), record[2].trim());
        let rating: f64 = match raw.parse() {
            Ok(r) => r,
            Err(_) if first => {
                // header row
                first = false;
                continue;
            }
            Err(_) => {
                return Err(DataError::Parse {
                    line,
                    message: format!("rating {raw:?} is not a number"),
                })
            }
        };
        first = false;
        builder.touch(user, item);
        if rating == JESTER_MISSING {
            continue;
        }
        if !scale.contains(rating) {
            return Err(DataError::Validation {
                line,
                message: format!("rating {rating} outside [-10, 10] and not the 99 sentinel"),
            });
        }
        builder.add(user, item, rating)?;
    }
    Ok(builder.finish())
}

/// Load a BookCrossing native dump: semicolon-separated, double-quoted
/// `"User-ID";"ISBN";"Book-Rating"` rows with a header. Rating 0 marks
/// implicit feedback and is dropped; explicit ratings are 1..=10.
pub fn load_bookcrossing(path: &Path) -> Result<RatingMatrix, DataError> {
    let scale = RatingScale::new(1.0, 10.0)?;
    let mut builder = MatrixBuilder::new(scale);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(b';')
        .flexible(true)
        .from_path(path)
        .map_err(csv_to_data_error)?;

    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(csv_to_data_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 3 {
            return Err(DataError::Parse {
                line,
                message: format!(
                    "expected 3 fields `user;isbn;rating`, got {}",
                    record.len()
                ),
            });
        }
        let (user, item, raw) = (record[0].trim(), record[1].trim(), record[2].trim());
        let rating: f64 = match raw.parse() {
            Ok(r) => r,
            Err(_) if first => {
                first = false;
                continue;
            }
            Err(_) => {
                return Err(DataError::Validation {
                    line,
                    message: format!("rating {raw:?} is not a number"),
                })
            }
        };
        first = false;
        builder.touch(user, item);
        if rating == 0.0 {
            continue; // implicit feedback
        }
        if !scale.contains(rating) {
            return Err(DataError::Validation {
                line,
                message: format!("rating {rating} outside [1, 10]"),
            });
        }
        builder.add(user, item, rating)?;
    }
    Ok(builder.finish())
}

fn csv_to_data_error(err: csv::Error) -> DataError {
    if err.is_io_error() {
        match err.into_kind() {
            csv::ErrorKind::Io(io) => DataError::Io(io),
            _ => unreachable!(),
        }
    } else {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        DataError::Parse {
            line,
            message: err.to_string(),
        }
    }
}
