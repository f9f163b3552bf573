//! Reads respondent records in the field CSV layout and reports estimates
//! with a bootstrap interval.

use rdslab::bootstrap::{bootstrap_ci, BootstrapConfig, BootstrapMethod};
use rdslab::estimate::estimate_all;
use rdslab::harness::parse_rds_data;

const FIELD: &str = "respondent_id,wave,recruiter_id,group,reported_degree,reported_n_A,reported_n_B
s1,0,,A,6,3,3
s2,0,,B,4,1,3
r01,1,s1,A,5,3,2
r02,1,s1,B,3,1,2
r03,1,s2,B,8,2,6
r04,1,s2,A,2,1,1
r05,2,r01,A,7,4,3
r06,2,r01,B,4,1,3
r07,2,r02,B,2,0,2
r08,2,r03,B,5,1,4
r09,2,r03,A,3,2,1
r10,2,r04,B,6,2,4
r11,3,r05,A,4,3,1
r12,3,r06,B,9,3,6
r13,3,r08,A,3,1,2
r14,3,r09,B,2,1,1
r15,3,r10,B,5,1,4
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = parse_rds_data(FIELD, "field.csv")?;
    println!("{} respondents, {} recruitments", data.sample.len(), data.sample.recruitment_edges.len());
    println!("{}", serde_json::to_string_pretty(&estimate_all(&data.sample))?);
    let out = bootstrap_ci(&data.sample, &BootstrapConfig::new(BootstrapMethod::Ego2, 2000, 0.9), 1)?;
    println!("90% interval (ego2): [{:.3}, {:.3}]", out.interval.lower, out.interval.upper);
    Ok(())
}
