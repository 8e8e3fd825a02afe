//! Holds the `acceptance` integration test target. Run it with
//! `cargo test -p lchi-verify --test acceptance -- --nocapture --test-threads 1`.
