//! Regenerate the bundled fixture files under fixtures/.
//!
//! cargo run -p edgeslice --example generate_fixtures

use edgeslice::fixtures;

fn main() -> Result<(), edgeslice::Error> {
    fixtures::write_fixture_files("fixtures")?;
    for name in fixtures::FIXTURE_NAMES.iter().chain(&fixtures::CANDIDATE_FIXTURE_NAMES) {
        println!("fixtures/{name}.json");
    }
    Ok(())
}
