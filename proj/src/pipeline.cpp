#include "ballidx/pipeline.hpp"

#include <chrono>

namespace ballidx {

void BuildConfig::validate() const {
    thresholds.validate();
    (void)DistanceFn::from_name(metric);
    if (method != BuildMethod::Baseline) dbscan.validate();
}

BuildOutput build_forest(std::shared_ptr<const Dataset> ds, const BuildConfig& cfg) {
    cfg.validate();
    return build_forest(std::move(ds), cfg, DistanceFn::from_name(cfg.metric));
}

BuildOutput build_forest(std::shared_ptr<const Dataset> ds, const BuildConfig& cfg, const DistanceFn& fn) {
    const auto start = std::chrono::steady_clock::now();
    cfg.thresholds.validate();
    if (!ds || ds->empty()) throw data_error("cannot build over an empty dataset");

    BuildReport report;
    report.method = cfg.method;
    report.objects = ds->size();
    report.dimension = ds->dimension();

    IndexPlan plan;
    if (cfg.method == BuildMethod::Baseline) {
        plan = single_group_plan(*ds, fn, report.costs.planning);
    } else {
        cfg.dbscan.validate();
        DbscanResult clusters = run_dbscan(*ds, cfg.dbscan, fn, report.costs.clustering);
        report.clusters = clusters.partitions.size();
        report.noise = clusters.noise_ids.size();
        auto partitions =
            absorb_noise(std::move(clusters.partitions), clusters.noise_ids, *ds, fn, report.costs.clustering);

        OverlapMethod heuristic = OverlapMethod::Vbm;
        if (cfg.method == BuildMethod::Dbm) heuristic = OverlapMethod::Dbm;
        if (cfg.method == BuildMethod::Obm) heuristic = OverlapMethod::Obm;
        plan = plan_indexes(partitions, heuristic, cfg.thresholds, *ds, fn, report.costs.planning);
    }

    Forest forest = Forest::from_plan(std::move(ds), fn, cfg.method, plan, report.costs.indexing);
    report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(forest), report};
}

} // namespace ballidx
