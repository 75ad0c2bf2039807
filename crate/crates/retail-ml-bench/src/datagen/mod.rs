//! Synthetic retail dataset generator.
//!
//! Emits five files per dataset: customers.csv, products.csv, sales.csv,
//! reviews.csv and weblog.jsonl, plus a small manifest with the generating
//! configuration. Output is byte-identical for identical configurations.
//!
//! The generator plants latent structure the workloads can recover:
//! segment-specific book-category preferences, sentiment-specific review
//! vocabulary, co-purchase bundles inside baskets, and skewed per-user
//! click propensities.

mod load;
mod words;

pub use load::load;
pub use words::{sentiment_of_rating, word_pools, Sentiment, WordPools};

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, Prng, TAG_CUSTOMERS, TAG_PRODUCTS, TAG_REVIEWS, TAG_SALES, TAG_WEBLOG};

pub const CUSTOMERS_FILE: &str = "customers.csv";
pub const PRODUCTS_FILE: &str = "products.csv";
pub const SALES_FILE: &str = "sales.csv";
pub const REVIEWS_FILE: &str = "reviews.csv";
pub const WEBLOG_FILE: &str = "weblog.jsonl";
pub const MANIFEST_FILE: &str = "gen_manifest.json";

/// Product categories in the catalog (weblog click universe).
pub const N_PRODUCT_CATEGORIES: usize = 10;
/// Fraction of the catalog that is books.
const BOOK_FRACTION: f64 = 0.4;
/// Probability that a non-bundle sale line is a book purchase.
const P_BOOK_PURCHASE: f64 = 0.8;
/// Probability that a sale line happens in a physical store. Book shoppers
/// lean harder toward stores, which keeps the in-store purchase history dense.
const P_STORE: f64 = 0.5;
const P_STORE_BOOK: f64 = 0.7;
/// Share of a segment's book purchases falling in its primary category.
const PRIMARY_CATEGORY_MASS: f64 = 0.9;
/// Probability per basket that one specific bundle is planted into it.
const BUNDLE_RATE_PER_BUNDLE: f64 = 0.05;

const SALES_PER_CUSTOMER: usize = 20;
const REVIEWS_PER_CUSTOMER: usize = 5;
const EVENTS_PER_CUSTOMER: usize = 200;
const LINES_PER_BASKET: usize = 4;

const REVIEW_MIN_TOKENS: usize = 5;
/// Geometric tail parameter; mean review length is about 30 tokens.
const REVIEW_LENGTH_P: f64 = 0.04;
const REVIEW_MAX_TOKENS: usize = 300;

const SESSION_SWITCH_PROB: f64 = 0.1;

/// Generator configuration. `output_dir` is where [`generate`] writes; the
/// remaining fields are persisted to the dataset manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenConfig {
    pub sf: f64,
    pub seed: u64,
    pub n_segments: usize,
    pub n_book_categories: usize,
    pub n_bundles: usize,
    pub bundle_size: usize,
    pub sentiment_signal: f64,
    #[serde(skip, default)]
    pub output_dir: PathBuf,
}

impl GenConfig {
    pub fn new(sf: f64, seed: u64, output_dir: impl Into<PathBuf>) -> Self {
        GenConfig {
            sf,
            seed,
            n_segments: 4,
            n_book_categories: 5,
            n_bundles: 5,
            bundle_size: 3,
            sentiment_signal: 0.6,
            output_dir: output_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sf > 0.0) || !self.sf.is_finite() {
            return Err(Error::InvalidConfig(format!("sf must be > 0, got {}", self.sf)));
        }
        if self.n_segments < 1 || self.n_book_categories < 1 || self.n_bundles < 1 {
            return Err(Error::InvalidConfig(
                "n_segments, n_book_categories and n_bundles must be >= 1".into(),
            ));
        }
        if self.bundle_size < 3 {
            return Err(Error::InvalidConfig("bundle_size must be >= 3".into()));
        }
        if self.bundle_size > SALES_PER_CUSTOMER {
            return Err(Error::InvalidConfig(format!(
                "bundle_size must fit a customer's {SALES_PER_CUSTOMER} sale lines"
            )));
        }
        // sentiment_signal 0 is allowed as the no-signal control.
        if !(0.0..=1.0).contains(&self.sentiment_signal) {
            return Err(Error::InvalidConfig(
                "sentiment_signal must lie in [0, 1]".into(),
            ));
        }
        let plan = size_plan_unchecked(self.sf);
        if self.n_bundles * self.bundle_size > plan.products {
            return Err(Error::InvalidConfig(format!(
                "{} bundles of size {} exceed the {}-product catalog",
                self.n_bundles, self.bundle_size, plan.products
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SizePlan {
    pub customers: usize,
    pub products: usize,
    pub sales: usize,
    pub reviews: usize,
    pub weblog_events: usize,
}

fn size_plan_unchecked(sf: f64) -> SizePlan {
    let customers = ((1000.0 * sf).round() as usize).max(1);
    let products = ((100.0 + 50.0 * sf).round() as usize).max(20);
    SizePlan {
        customers,
        products,
        sales: SALES_PER_CUSTOMER * customers,
        reviews: REVIEWS_PER_CUSTOMER * customers,
        weblog_events: EVENTS_PER_CUSTOMER * customers,
    }
}

/// Row counts for a configuration, without generating anything.
pub fn size_plan(cfg: &GenConfig) -> SizePlan {
    size_plan_unchecked(cfg.sf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Channel {
    Store,
    Online,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Store => "store",
            Channel::Online => "online",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Customer {
    pub id: usize,
    /// Latent segment; emitted for evaluation only, never a learner input.
    pub segment_id: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Product {
    pub id: usize,
    pub category_id: usize,
    pub is_book: bool,
    pub book_category_id: Option<usize>,
    /// Latent bundle membership; emitted for evaluation only.
    pub bundle_id: Option<usize>,
    pub unit_price: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaleLine {
    pub id: usize,
    pub customer_id: usize,
    pub product_id: usize,
    pub quantity: u32,
    pub channel: Channel,
    pub day: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Review {
    pub id: usize,
    pub customer_id: usize,
    pub product_id: usize,
    pub rating: u8,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeblogEvent {
    pub ts: u64,
    pub user_id: usize,
    pub item_id: usize,
    pub category_id: usize,
    pub session_id: u64,
    pub action: String,
}

/// The generated tables. Weblog events stay on disk and are streamed by
/// consumers; `manifest` carries the generating configuration when known.
#[derive(Debug, Clone)]
pub struct RetailDataset {
    pub customers: Vec<Customer>,
    pub products: Vec<Product>,
    pub sales: Vec<SaleLine>,
    pub reviews: Vec<Review>,
    pub weblog_path: PathBuf,
    pub manifest: Option<GenConfig>,
}

impl RetailDataset {
    /// Product ids per planted bundle, reconstructed from the product table.
    pub fn bundles(&self) -> Vec<Vec<usize>> {
        let mut max_bundle = None;
        for p in &self.products {
            if let Some(b) = p.bundle_id {
                max_bundle = Some(max_bundle.map_or(b, |m: usize| m.max(b)));
            }
        }
        let Some(max_bundle) = max_bundle else {
            return Vec::new();
        };
        let mut bundles = vec![Vec::new(); max_bundle + 1];
        for p in &self.products {
            if let Some(b) = p.bundle_id {
                bundles[b].push(p.id);
            }
        }
        bundles
    }
}

/// Book-category distribution planted for one customer segment: the primary
/// category takes [`PRIMARY_CATEGORY_MASS`], the rest is spread uniformly.
pub fn segment_book_distribution(segment: usize, n_book_categories: usize) -> Vec<f64> {
    let b = n_book_categories;
    if b == 1 {
        return vec![1.0];
    }
    let primary = segment % b;
    let rest = (1.0 - PRIMARY_CATEGORY_MASS) / (b - 1) as f64;
    (0..b)
        .map(|c| if c == primary { PRIMARY_CATEGORY_MASS } else { rest })
        .collect()
}

fn sample_index(rng: &mut Prng, weights: &[f64], total: f64) -> usize {
    let mut target = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if target < w {
            return i;
        }
        target -= w;
    }
    weights.len() - 1
}

/// Basket line counts for one customer: chunks of max(4, bundle_size) lines,
/// with any remainder forming a final short basket.
fn basket_layout(bundle_size: usize) -> Vec<usize> {
    let per = LINES_PER_BASKET.max(bundle_size);
    let mut layout = vec![per; SALES_PER_CUSTOMER / per];
    let rem = SALES_PER_CUSTOMER % per;
    if rem > 0 {
        layout.push(rem);
    }
    layout
}

struct Catalog {
    products: Vec<Product>,
    books_by_category: Vec<Vec<usize>>,
    non_books: Vec<usize>,
    by_category: Vec<Vec<usize>>,
    bundles: Vec<Vec<usize>>,
}

fn generate_products(cfg: &GenConfig, plan: &SizePlan) -> Catalog {
    let mut rng = stream(cfg.seed, TAG_PRODUCTS);
    let p = plan.products;
    let n_books = ((BOOK_FRACTION * p as f64).round() as usize)
        .max(cfg.n_book_categories)
        .min(p - 1);

    let mut products = Vec::with_capacity(p);
    let mut books_by_category = vec![Vec::new(); cfg.n_book_categories];
    let mut non_books = Vec::new();
    let mut by_category = vec![Vec::new(); N_PRODUCT_CATEGORIES];
    let mut book_seq = 0usize;
    for id in 0..p {
        // Spread books evenly over the catalog.
        let is_book = (id + 1) * n_books / p > id * n_books / p;
        let book_category_id = if is_book {
            let c = book_seq % cfg.n_book_categories;
            book_seq += 1;
            books_by_category[c].push(id);
            Some(c)
        } else {
            non_books.push(id);
            None
        };
        let category_id = id % N_PRODUCT_CATEGORIES;
        by_category[category_id].push(id);
        let unit_price = (rng.gen_range(2.0f64..60.0) * 100.0).round() / 100.0;
        products.push(Product {
            id,
            category_id,
            is_book,
            book_category_id,
            bundle_id: None,
            unit_price,
        });
    }

    // Partial Fisher-Yates draw of distinct products, chunked into bundles.
    let picks = cfg.n_bundles * cfg.bundle_size;
    let mut ids: Vec<usize> = (0..p).collect();
    for i in 0..picks {
        let j = rng.gen_range(i..p);
        ids.swap(i, j);
    }
    let mut bundles = Vec::with_capacity(cfg.n_bundles);
    for b in 0..cfg.n_bundles {
        let mut members = ids[b * cfg.bundle_size..(b + 1) * cfg.bundle_size].to_vec();
        members.sort_unstable();
        for &m in &members {
            products[m].bundle_id = Some(b);
        }
        bundles.push(members);
    }

    Catalog {
        products,
        books_by_category,
        non_books,
        by_category,
        bundles,
    }
}

fn generate_customers(cfg: &GenConfig, plan: &SizePlan) -> Vec<Customer> {
    let mut rng = stream(cfg.seed, TAG_CUSTOMERS);
    (0..plan.customers)
        .map(|id| Customer {
            id,
            segment_id: id % cfg.n_segments,
            name: words::make_word(&mut rng),
        })
        .collect()
}

fn generate_sales(cfg: &GenConfig, customers: &[Customer], catalog: &Catalog) -> Vec<SaleLine> {
    let mut rng = stream(cfg.seed, TAG_SALES);
    let layout = basket_layout(cfg.bundle_size);
    let segment_dists: Vec<Vec<f64>> = (0..cfg.n_segments)
        .map(|s| segment_book_distribution(s, cfg.n_book_categories))
        .collect();

    let mut sales = Vec::with_capacity(customers.len() * SALES_PER_CUSTOMER);
    let mut next_id = 0usize;
    for customer in customers {
        let dist = &segment_dists[customer.segment_id];
        for (basket_idx, &basket_lines) in layout.iter().enumerate() {
            let day = (basket_idx * 7) as u32 + rng.gen_range(0..7u32);
            let plant_bundle = basket_lines >= cfg.bundle_size
                && rng.gen::<f64>() < BUNDLE_RATE_PER_BUNDLE * cfg.n_bundles as f64;
            let mut line_products = Vec::with_capacity(basket_lines);
            if plant_bundle {
                let b = rng.gen_range(0..cfg.n_bundles);
                line_products.extend_from_slice(&catalog.bundles[b]);
            }
            while line_products.len() < basket_lines {
                let product = if rng.gen::<f64>() < P_BOOK_PURCHASE {
                    let cat = sample_index(&mut rng, dist, 1.0);
                    let choices = &catalog.books_by_category[cat];
                    choices[rng.gen_range(0..choices.len())]
                } else {
                    catalog.non_books[rng.gen_range(0..catalog.non_books.len())]
                };
                line_products.push(product);
            }
            for product_id in line_products {
                let p_store = if catalog.products[product_id].is_book {
                    P_STORE_BOOK
                } else {
                    P_STORE
                };
                sales.push(SaleLine {
                    id: next_id,
                    customer_id: customer.id,
                    product_id,
                    quantity: rng.gen_range(1..=3),
                    channel: if rng.gen::<f64>() < p_store {
                        Channel::Store
                    } else {
                        Channel::Online
                    },
                    day,
                });
                next_id += 1;
            }
        }
    }
    sales
}

fn generate_reviews(
    cfg: &GenConfig,
    customers: &[Customer],
    n_products: usize,
    pools: &WordPools,
) -> Vec<Review> {
    let mut rng = stream(cfg.seed, TAG_REVIEWS);
    let mut reviews = Vec::with_capacity(customers.len() * REVIEWS_PER_CUSTOMER);
    let mut next_id = 0usize;
    for customer in customers {
        for _ in 0..REVIEWS_PER_CUSTOMER {
            let product_id = rng.gen_range(0..n_products);
            let rating: u8 = rng.gen_range(1..=5);
            let pool = pools.pool(sentiment_of_rating(rating));
            let u: f64 = rng.gen();
            let tail = ((1.0 - u).ln() / (1.0 - REVIEW_LENGTH_P).ln()) as usize;
            let len = (REVIEW_MIN_TOKENS + tail).min(REVIEW_MAX_TOKENS);
            let mut tokens = Vec::with_capacity(len);
            for _ in 0..len {
                let from_pool = rng.gen::<f64>() < cfg.sentiment_signal;
                let word = if from_pool {
                    &pool[rng.gen_range(0..pool.len())]
                } else {
                    &pools.noise[rng.gen_range(0..pools.noise.len())]
                };
                tokens.push(word.as_str());
            }
            reviews.push(Review {
                id: next_id,
                customer_id: customer.id,
                product_id,
                rating,
                text: tokens.join(" "),
            });
            next_id += 1;
        }
    }
    reviews
}

/// Writes the weblog stream straight to disk; events are never all in memory.
fn generate_weblog(
    cfg: &GenConfig,
    plan: &SizePlan,
    catalog: &Catalog,
    path: &Path,
) -> Result<()> {
    let mut rng = stream(cfg.seed, TAG_WEBLOG);
    let n_users = plan.customers;

    // Per-user skewed category propensity: Zipf weights over a random
    // permutation of the categories.
    let zipf: Vec<f64> = (0..N_PRODUCT_CATEGORIES)
        .map(|rank| 1.0 / (rank + 1) as f64)
        .collect();
    let zipf_total: f64 = zipf.iter().sum();
    let mut propensities: Vec<Vec<f64>> = Vec::with_capacity(n_users);
    for _ in 0..n_users {
        let mut perm: Vec<usize> = (0..N_PRODUCT_CATEGORIES).collect();
        for i in (1..perm.len()).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let mut weights = vec![0.0; N_PRODUCT_CATEGORIES];
        for (rank, &cat) in perm.iter().enumerate() {
            weights[cat] = zipf[rank];
        }
        propensities.push(weights);
    }

    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut session_index = vec![0u64; n_users];
    let mut has_session = vec![false; n_users];
    for ts in 0..plan.weblog_events as u64 {
        let user_id = rng.gen_range(0..n_users);
        let category_id = sample_index(&mut rng, &propensities[user_id], zipf_total);
        let items = &catalog.by_category[category_id];
        let item_id = items[rng.gen_range(0..items.len())];
        if !has_session[user_id] || rng.gen::<f64>() < SESSION_SWITCH_PROB {
            has_session[user_id] = true;
            session_index[user_id] += 1;
        }
        let event = WeblogEvent {
            ts,
            user_id,
            item_id,
            category_id,
            session_id: user_id as u64 * 100_000 + session_index[user_id],
            action: "click".to_string(),
        };
        serde_json::to_writer(&mut out, &event).map_err(|e| {
            Error::io(path, std::io::Error::new(std::io::ErrorKind::Other, e))
        })?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

fn write_customers(customers: &[Customer], path: &Path) -> Result<()> {
    let mut out = String::from("id,segment_id,name\n");
    for c in customers {
        out.push_str(&format!("{},{},{}\n", c.id, c.segment_id, c.name));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn write_products(products: &[Product], path: &Path) -> Result<()> {
    let mut out = String::from("id,category_id,is_book,book_category_id,bundle_id,unit_price\n");
    for p in products {
        let book_cat = p.book_category_id.map_or(String::new(), |c| c.to_string());
        let bundle = p.bundle_id.map_or(String::new(), |b| b.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{:.2}\n",
            p.id, p.category_id, p.is_book, book_cat, bundle, p.unit_price
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn write_sales(sales: &[SaleLine], path: &Path) -> Result<()> {
    let mut out = String::from("id,customer_id,product_id,quantity,channel,day\n");
    for s in sales {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.id,
            s.customer_id,
            s.product_id,
            s.quantity,
            s.channel.as_str(),
            s.day
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn write_reviews(reviews: &[Review], path: &Path) -> Result<()> {
    let mut out = String::from("id,customer_id,product_id,rating,text\n");
    for r in reviews {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.id, r.customer_id, r.product_id, r.rating, r.text
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Generates the dataset described by `cfg`, writes every file under
/// `cfg.output_dir`, and returns the in-memory tables.
pub fn generate(cfg: &GenConfig) -> Result<RetailDataset> {
    cfg.validate()?;
    let plan = size_plan(cfg);
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let pools = word_pools(cfg.seed);
    let catalog = generate_products(cfg, &plan);
    let customers = generate_customers(cfg, &plan);
    let sales = generate_sales(cfg, &customers, &catalog);
    let reviews = generate_reviews(cfg, &customers, plan.products, &pools);
    debug_assert_eq!(sales.len(), plan.sales);
    debug_assert_eq!(reviews.len(), plan.reviews);

    write_customers(&customers, &dir.join(CUSTOMERS_FILE))?;
    write_products(&catalog.products, &dir.join(PRODUCTS_FILE))?;
    write_sales(&sales, &dir.join(SALES_FILE))?;
    write_reviews(&reviews, &dir.join(REVIEWS_FILE))?;
    let weblog_path = dir.join(WEBLOG_FILE);
    generate_weblog(cfg, &plan, &catalog, &weblog_path)?;

    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest_json =
        serde_json::to_string_pretty(cfg).expect("config serializes") + "\n";
    fs::write(&manifest_path, manifest_json).map_err(|e| Error::io(&manifest_path, e))?;

    Ok(RetailDataset {
        customers,
        products: catalog.products,
        sales,
        reviews,
        weblog_path,
        manifest: Some(cfg.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_cfg(sf: f64, seed: u64, dir: &Path) -> GenConfig {
        GenConfig::new(sf, seed, dir)
    }

    #[test]
    fn size_plan_formulas() {
        let dir = PathBuf::from("unused");
        let plan1 = size_plan(&test_cfg(1.0, 0, &dir));
        assert_eq!(plan1.customers, 1000);
        assert_eq!(plan1.sales, 20_000);
        assert_eq!(plan1.reviews, 5_000);
        assert_eq!(plan1.weblog_events, 200_000);

        let plan001 = size_plan(&test_cfg(0.01, 0, &dir));
        assert_eq!(plan001.customers, 10);
        assert_eq!(plan001.products, 101);
        assert_eq!(plan001.weblog_events, 2_000);
    }

    #[test]
    fn size_plan_is_monotone_in_sf() {
        let dir = PathBuf::from("unused");
        let small = size_plan(&test_cfg(1.0, 0, &dir));
        let large = size_plan(&test_cfg(10.0, 0, &dir));
        assert!(large.customers >= small.customers);
        assert!(large.products >= small.products);
        assert!(large.sales >= small.sales);
        assert!(large.reviews >= small.reviews);
        assert!(large.weblog_events >= small.weblog_events);
    }

    #[test]
    fn invalid_configs_are_rejected_before_any_write() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = test_cfg(-1.0, 0, dir.path());
        assert!(generate(&cfg).is_err());
        cfg.sf = 0.1;
        cfg.sentiment_signal = 1.5;
        assert!(generate(&cfg).is_err());
        cfg.sentiment_signal = 0.6;
        cfg.bundle_size = 2;
        assert!(generate(&cfg).is_err());
        assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
    }

    #[test]
    fn segment_distributions_are_well_separated() {
        let cfg = test_cfg(0.1, 42, &PathBuf::from("unused"));
        for a in 0..cfg.n_segments {
            for b in (a + 1)..cfg.n_segments {
                let da = segment_book_distribution(a, cfg.n_book_categories);
                let db = segment_book_distribution(b, cfg.n_book_categories);
                let tv: f64 = da
                    .iter()
                    .zip(&db)
                    .map(|(x, y)| (x - y).abs())
                    .sum::<f64>()
                    / 2.0;
                assert!(tv >= 0.5, "segments {a},{b} have TV {tv}");
                let sum: f64 = da.iter().sum();
                assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn basket_layout_covers_all_sale_lines() {
        for bundle_size in 3..=20 {
            let layout = basket_layout(bundle_size);
            assert_eq!(layout.iter().sum::<usize>(), SALES_PER_CUSTOMER);
            assert!(layout.iter().all(|&l| l >= 1));
        }
    }

    #[test]
    fn generation_is_byte_identical_under_a_fixed_seed() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        generate(&test_cfg(0.02, 42, dir_a.path())).unwrap();
        generate(&test_cfg(0.02, 42, dir_b.path())).unwrap();
        for file in [CUSTOMERS_FILE, PRODUCTS_FILE, SALES_FILE, REVIEWS_FILE, WEBLOG_FILE] {
            let a = fs::read(dir_a.path().join(file)).unwrap();
            let b = fs::read(dir_b.path().join(file)).unwrap();
            assert_eq!(a, b, "{file} differs between runs");
        }
    }

    #[test]
    fn different_seeds_differ() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        generate(&test_cfg(0.02, 1, dir_a.path())).unwrap();
        generate(&test_cfg(0.02, 2, dir_b.path())).unwrap();
        let a = fs::read(dir_a.path().join(REVIEWS_FILE)).unwrap();
        let b = fs::read(dir_b.path().join(REVIEWS_FILE)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn row_counts_match_the_plan_across_scale_factors() {
        for sf in [0.01, 0.05, 0.1] {
            let dir = tempfile::tempdir().unwrap();
            let cfg = test_cfg(sf, 7, dir.path());
            let plan = size_plan(&cfg);
            let ds = generate(&cfg).unwrap();
            assert_eq!(ds.customers.len(), plan.customers);
            assert_eq!(ds.products.len(), plan.products);
            assert_eq!(ds.sales.len(), plan.sales);
            assert_eq!(ds.reviews.len(), plan.reviews);
            let weblog = fs::read_to_string(&ds.weblog_path).unwrap();
            assert_eq!(weblog.lines().count(), plan.weblog_events);
        }
    }

    #[test]
    fn reviews_count_example_at_desk_scale() {
        let dir = tempfile::tempdir().unwrap();
        let ds = generate(&test_cfg(0.01, 42, dir.path())).unwrap();
        assert_eq!(ds.reviews.len(), 50);
    }

    #[test]
    fn every_bundle_is_contained_in_at_least_one_percent_of_baskets() {
        use std::collections::{BTreeMap, BTreeSet};
        let dir = tempfile::tempdir().unwrap();
        let ds = generate(&test_cfg(0.1, 42, dir.path())).unwrap();

        // Recount containment by re-reading the emitted sales file.
        let raw = fs::read_to_string(dir.path().join(SALES_FILE)).unwrap();
        let mut baskets: BTreeMap<(usize, u32), BTreeSet<usize>> = BTreeMap::new();
        for line in raw.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            let customer: usize = cols[1].parse().unwrap();
            let product: usize = cols[2].parse().unwrap();
            let day: u32 = cols[5].parse().unwrap();
            baskets.entry((customer, day)).or_default().insert(product);
        }
        let n_baskets = baskets.len() as f64;
        for (b, bundle) in ds.bundles().iter().enumerate() {
            let containing = baskets
                .values()
                .filter(|basket| bundle.iter().all(|p| basket.contains(p)))
                .count() as f64;
            let fraction = containing / n_baskets;
            assert!(fraction >= 0.01, "bundle {b} contained in {fraction} of baskets");
        }
    }

    #[test]
    fn review_tokens_follow_the_sentiment_signal() {
        use std::collections::HashSet;
        let dir = tempfile::tempdir().unwrap();
        let cfg = test_cfg(0.1, 42, dir.path());
        let ds = generate(&cfg).unwrap();
        let pools = word_pools(cfg.seed);
        let own_pool: Vec<HashSet<&str>> = Sentiment::ALL
            .iter()
            .map(|&s| pools.pool(s).iter().map(|w| w.as_str()).collect())
            .collect();
        let mut from_pool = 0usize;
        let mut total = 0usize;
        for review in &ds.reviews {
            let class = sentiment_of_rating(review.rating).index();
            for token in review.text.split(' ') {
                total += 1;
                if own_pool[class].contains(token) {
                    from_pool += 1;
                }
            }
        }
        let fraction = from_pool as f64 / total as f64;
        assert!(
            (fraction - cfg.sentiment_signal).abs() < 0.03,
            "pool fraction {fraction}"
        );
    }

    #[test]
    fn weblog_timestamps_are_nondecreasing_and_categories_consistent() {
        let dir = tempfile::tempdir().unwrap();
        let ds = generate(&test_cfg(0.02, 3, dir.path())).unwrap();
        let raw = fs::read_to_string(&ds.weblog_path).unwrap();
        let mut last_ts = 0u64;
        for line in raw.lines() {
            let ev: WeblogEvent = serde_json::from_str(line).unwrap();
            assert!(ev.ts >= last_ts);
            last_ts = ev.ts;
            assert_eq!(ev.category_id, ds.products[ev.item_id].category_id);
            assert_eq!(ev.action, "click");
        }
    }
}
