use std::path::Path;

use infonce_k::gaussian::mu_from_auc;

use super::required;
use crate::config::Settings;
use crate::error::CliResult;

pub fn run(auc: Option<f64>, clamp: bool, config: Option<&Path>) -> CliResult<()> {
    let mut settings = Settings::load(config)?;
    let auc = required(settings.pick(auc, "auc")?, "auc")?;
    let clamp = settings.pick_bool(clamp, "clamp")?;
    settings.finish()?;
    println!("{}", mu_from_auc(auc, clamp)?);
    Ok(())
}
