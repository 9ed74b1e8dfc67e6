//! Dataset ingestion and result emission: TUDataset text files in, CSV and
//! SVG out.

mod svg;
mod table;
mod tudataset;

pub use svg::{render_svg_lines, Series, SvgError};
pub use table::{fmt_f64, write_csv, CsvTable, TableError};
pub use tudataset::{parse_tudataset, write_tudataset, TudDirectory, TudError};
