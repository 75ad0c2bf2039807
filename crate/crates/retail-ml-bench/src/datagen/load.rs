//! Dataset loading with per-line parse errors and referential-integrity checks.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::{
    Channel, Customer, GenConfig, Product, RetailDataset, Review, SaleLine, WeblogEvent,
    CUSTOMERS_FILE, MANIFEST_FILE, PRODUCTS_FILE, REVIEWS_FILE, SALES_FILE, WEBLOG_FILE,
};

struct CsvFile {
    name: String,
    lines: Vec<String>,
}

impl CsvFile {
    fn open(path: &Path, expected_header: &str) -> Result<CsvFile> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path.display().to_string();
        let mut lines = raw.lines();
        match lines.next() {
            Some(header) if header == expected_header => {}
            Some(header) => {
                return Err(Error::MalformedRow {
                    file: name,
                    line: 1,
                    message: format!("bad header {header:?}, expected {expected_header:?}"),
                })
            }
            None => {
                return Err(Error::MalformedRow {
                    file: name,
                    line: 1,
                    message: "missing header".into(),
                })
            }
        }
        Ok(CsvFile {
            name,
            lines: lines.map(str::to_string).collect(),
        })
    }

    fn malformed(&self, line_idx: usize, message: impl Into<String>) -> Error {
        Error::MalformedRow {
            file: self.name.clone(),
            // +2: 1-based with the header on line 1.
            line: line_idx + 2,
            message: message.into(),
        }
    }

    fn integrity(&self, line_idx: usize, message: impl Into<String>) -> Error {
        Error::Integrity {
            file: self.name.clone(),
            line: line_idx + 2,
            message: message.into(),
        }
    }
}

fn field<T: FromStr>(csv: &CsvFile, line_idx: usize, raw: &str, what: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| csv.malformed(line_idx, format!("invalid {what}: {raw:?}")))
}

fn opt_field<T: FromStr>(csv: &CsvFile, line_idx: usize, raw: &str, what: &str) -> Result<Option<T>> {
    if raw.is_empty() {
        return Ok(None);
    }
    field(csv, line_idx, raw, what).map(Some)
}

fn split_columns<'l>(
    csv: &CsvFile,
    line_idx: usize,
    line: &'l str,
    n: usize,
    text_tail: bool,
) -> Result<Vec<&'l str>> {
    let cols: Vec<&str> = if text_tail {
        line.splitn(n, ',').collect()
    } else {
        line.split(',').collect()
    };
    if cols.len() != n {
        return Err(csv.malformed(line_idx, format!("expected {n} columns, found {}", cols.len())));
    }
    Ok(cols)
}

fn load_customers(dir: &Path) -> Result<Vec<Customer>> {
    let csv = CsvFile::open(&dir.join(CUSTOMERS_FILE), "id,segment_id,name")?;
    let mut out = Vec::with_capacity(csv.lines.len());
    for (i, line) in csv.lines.iter().enumerate() {
        let cols = split_columns(&csv, i, line, 3, true)?;
        let id: usize = field(&csv, i, cols[0], "id")?;
        if id != out.len() {
            return Err(csv.malformed(i, format!("non-dense id {id}, expected {}", out.len())));
        }
        out.push(Customer {
            id,
            segment_id: field(&csv, i, cols[1], "segment_id")?,
            name: cols[2].to_string(),
        });
    }
    Ok(out)
}

fn load_products(dir: &Path) -> Result<Vec<Product>> {
    let csv = CsvFile::open(
        &dir.join(PRODUCTS_FILE),
        "id,category_id,is_book,book_category_id,bundle_id,unit_price",
    )?;
    let mut out = Vec::with_capacity(csv.lines.len());
    for (i, line) in csv.lines.iter().enumerate() {
        let cols = split_columns(&csv, i, line, 6, false)?;
        let id: usize = field(&csv, i, cols[0], "id")?;
        if id != out.len() {
            return Err(csv.malformed(i, format!("non-dense id {id}, expected {}", out.len())));
        }
        let is_book: bool = field(&csv, i, cols[2], "is_book")?;
        let book_category_id: Option<usize> = opt_field(&csv, i, cols[3], "book_category_id")?;
        if is_book != book_category_id.is_some() {
            return Err(csv.integrity(i, "book_category_id must be present iff is_book"));
        }
        let unit_price: f64 = field(&csv, i, cols[5], "unit_price")?;
        if !(unit_price > 0.0) {
            return Err(csv.malformed(i, format!("unit_price must be positive, got {unit_price}")));
        }
        out.push(Product {
            id,
            category_id: field(&csv, i, cols[1], "category_id")?,
            is_book,
            book_category_id,
            bundle_id: opt_field(&csv, i, cols[4], "bundle_id")?,
            unit_price,
        });
    }
    Ok(out)
}

fn load_sales(dir: &Path, n_customers: usize, n_products: usize) -> Result<Vec<SaleLine>> {
    let csv = CsvFile::open(
        &dir.join(SALES_FILE),
        "id,customer_id,product_id,quantity,channel,day",
    )?;
    let mut out = Vec::with_capacity(csv.lines.len());
    for (i, line) in csv.lines.iter().enumerate() {
        let cols = split_columns(&csv, i, line, 6, false)?;
        let customer_id: usize = field(&csv, i, cols[1], "customer_id")?;
        if customer_id >= n_customers {
            return Err(csv.integrity(i, format!("sale references absent customer {customer_id}")));
        }
        let product_id: usize = field(&csv, i, cols[2], "product_id")?;
        if product_id >= n_products {
            return Err(csv.integrity(i, format!("sale references absent product {product_id}")));
        }
        let quantity: u32 = field(&csv, i, cols[3], "quantity")?;
        if quantity == 0 {
            return Err(csv.malformed(i, "quantity must be positive"));
        }
        let channel = match cols[4] {
            "store" => Channel::Store,
            "online" => Channel::Online,
            other => return Err(csv.malformed(i, format!("invalid channel {other:?}"))),
        };
        out.push(SaleLine {
            id: field(&csv, i, cols[0], "id")?,
            customer_id,
            product_id,
            quantity,
            channel,
            day: field(&csv, i, cols[5], "day")?,
        });
    }
    Ok(out)
}

fn load_reviews(dir: &Path, n_customers: usize, n_products: usize) -> Result<Vec<Review>> {
    let csv = CsvFile::open(&dir.join(REVIEWS_FILE), "id,customer_id,product_id,rating,text")?;
    let mut out = Vec::with_capacity(csv.lines.len());
    for (i, line) in csv.lines.iter().enumerate() {
        let cols = split_columns(&csv, i, line, 5, true)?;
        let customer_id: usize = field(&csv, i, cols[1], "customer_id")?;
        if customer_id >= n_customers {
            return Err(csv.integrity(i, format!("review references absent customer {customer_id}")));
        }
        let product_id: usize = field(&csv, i, cols[2], "product_id")?;
        if product_id >= n_products {
            return Err(csv.integrity(i, format!("review references absent product {product_id}")));
        }
        let rating: u8 = field(&csv, i, cols[3], "rating")?;
        if !(1..=5).contains(&rating) {
            return Err(csv.malformed(i, format!("rating {rating} outside 1..=5")));
        }
        if cols[4].is_empty() {
            return Err(csv.malformed(i, "empty review text"));
        }
        out.push(Review {
            id: field(&csv, i, cols[0], "id")?,
            customer_id,
            product_id,
            rating,
            text: cols[4].to_string(),
        });
    }
    Ok(out)
}

/// Streams the weblog once, checking item references, category consistency
/// and timestamp monotonicity.
fn check_weblog(path: &Path, products: &[Product]) -> Result<()> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let mut last_ts = 0u64;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let event: WeblogEvent = serde_json::from_str(&line).map_err(|e| Error::MalformedRow {
            file: name.clone(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if i > 0 && event.ts < last_ts {
            return Err(Error::Integrity {
                file: name,
                line: i + 1,
                message: format!("timestamp {} decreased below {last_ts}", event.ts),
            });
        }
        last_ts = event.ts;
        let Some(product) = products.get(event.item_id) else {
            return Err(Error::Integrity {
                file: name,
                line: i + 1,
                message: format!("event references absent item {}", event.item_id),
            });
        };
        if product.category_id != event.category_id {
            return Err(Error::Integrity {
                file: name,
                line: i + 1,
                message: format!(
                    "event category {} does not match item {} category {}",
                    event.category_id, event.item_id, product.category_id
                ),
            });
        }
    }
    Ok(())
}

/// Loads a dataset directory written by [`super::generate`]. The manifest is
/// optional; when present it restores the generating configuration.
pub fn load(dir: &Path) -> Result<RetailDataset> {
    let customers = load_customers(dir)?;
    let products = load_products(dir)?;
    let sales = load_sales(dir, customers.len(), products.len())?;
    let reviews = load_reviews(dir, customers.len(), products.len())?;
    let weblog_path = dir.join(WEBLOG_FILE);
    check_weblog(&weblog_path, &products)?;

    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest = if manifest_path.exists() {
        let raw = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
        let mut cfg: GenConfig = serde_json::from_str(&raw).map_err(|e| Error::MalformedRow {
            file: manifest_path.display().to_string(),
            line: 1,
            message: e.to_string(),
        })?;
        cfg.output_dir = dir.to_path_buf();
        Some(cfg)
    } else {
        None
    };

    Ok(RetailDataset {
        customers,
        products,
        sales,
        reviews,
        weblog_path,
        manifest,
    })
}
