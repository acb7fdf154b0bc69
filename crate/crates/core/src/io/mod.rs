//! Configuration files, CSV data files and run reports.

mod config;
mod report;
mod tables;

pub use config::{
    load_config, parse_config, AtomConfig, BeamConfig, GeometryConfig, KeyRule, MaterialConfig,
    RunConfig, RunSection, CONFIG_KEYS,
};
pub use report::{format_number, Report, TOOL_NAME, TOOL_VERSION};
pub use tables::{
    load_orders_csv, load_scan_csv, read_orders, read_scan, write_eps_csv, write_orders,
    write_orders_csv, write_scan, write_scan_csv, LoadedOrders,
};
