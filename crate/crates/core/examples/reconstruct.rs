use scatter2d_core::*;

fn main() -> Result<()> {
    let grid = GridSpec::new(2.1, 32)?;
    let v = Phantom::AnnulusSquare.sample(grid);
    let scenario = ScatteringScenario::fixed_energy(100.0)?;
    let data = synthesize_dataset(&v, &scenario, &ForwardOptions::default())?;
    let born = born_invert(&data);
    let iterates = run(&data, 6, Some(&v), &IterateOptions::default())?;
    println!("Born {:.3e}, n = 6 {:.3e}", l2_error(&born.potential, &v)?, iterates.errors[6]);
    Ok(())
}
