// Minimal ask/tell loop against the simulated drive, without the runner.

#include "commission/commission.hpp"

#include <iostream>

int main()
{
    using namespace commission;

    const SearchSpace space;
    SimulatedDrive drive(PlantModel{}, /*noise_seed=*/7, space);
    Study study(space, SamplerSettings{}, /*seed=*/42);
    const auto profile = tuning_profile();

    for (int t = 0; t < 30; ++t) {
        const auto gains = study.ask();
        study.tell(run_trial(drive, gains, profile));
    }

    const auto chosen = select_controller(study.front(), strategy_weights("balanced"));
    std::cout << "Pareto size " << study.front().size() << ", selected kp=" << chosen.point.kp << " ki=" << chosen.point.ki
              << " (IAE " << chosen.objectives.iae << ", OS " << chosen.objectives.os << ")\n";

    SimulatedDrive check(PlantModel{}, 8, space);
    const auto v = run_trial(check, chosen.point, validation_profile());
    std::cout << "validation: " << (v.stable ? "stable" : "unstable") << ", OS " << v.objectives.os << '\n';
}
