//! Every example must run.

mod load_and_transform {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/load_and_transform.rs"));
}

#[test]
fn load_and_transform_runs() {
    load_and_transform::run_example().expect("load_and_transform example should run");
}

mod partial_var_design {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/partial_var_design.rs"));
}

#[test]
fn partial_var_design_runs() {
    partial_var_design::run_example().expect("partial_var_design example should run");
}

mod lag_selection {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/lag_selection.rs"));
}

#[test]
fn lag_selection_runs() {
    lag_selection::run_example().expect("lag_selection example should run");
}

mod sur_estimation {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sur_estimation.rs"));
}

#[test]
fn sur_estimation_runs() {
    sur_estimation::run_example().expect("sur_estimation example should run");
}

mod cholesky_identification {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cholesky_identification.rs"));
}

#[test]
fn cholesky_identification_runs() {
    cholesky_identification::run_example().expect("cholesky_identification example should run");
}

mod impulse_responses {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/impulse_responses.rs"));
}

#[test]
fn impulse_responses_runs() {
    impulse_responses::run_example().expect("impulse_responses example should run");
}

mod variance_decomposition {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/variance_decomposition.rs"));
}

#[test]
fn variance_decomposition_runs() {
    variance_decomposition::run_example().expect("variance_decomposition example should run");
}

mod sector_model {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sector_model.rs"));
}

#[test]
fn sector_model_runs() {
    sector_model::run_example().expect("sector_model example should run");
}

mod country_study {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/country_study.rs"));
}

#[test]
fn country_study_runs() {
    country_study::run_example().expect("country_study example should run");
}
