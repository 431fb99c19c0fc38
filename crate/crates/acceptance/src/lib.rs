//! Holds the `acceptance` test target: `cargo test -p sdcomb-acceptance`.
