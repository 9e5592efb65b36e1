pub mod analyze;
pub mod evaluate;
pub mod extract;
pub mod prep_text;
pub mod synth;

use crate::config::ToolConfig;
use crate::ConfigArgs;

pub fn print_config(args: ConfigArgs) -> anyhow::Result<()> {
    let config = ToolConfig::load(args.config.as_deref())?;
    println!("{}", serde_json::to_string_pretty(&config)?);
    Ok(())
}
