#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "molexp/oracle/external.hpp"
#include "molexp/oracle/similarity.hpp"
#include "molexp/oracle/task.hpp"

namespace molexp::oracle {

namespace {

SimilarityKind similarity_kind_from(const std::string& s) {
    if (s == "levenshtein") return SimilarityKind::Levenshtein;
    if (s == "tanimoto") return SimilarityKind::Tanimoto;
    throw std::runtime_error("unknown similarity_kind: " + s);
}

MetricMode metric_mode_from(const std::string& s) {
    if (s == "max") return MetricMode::Max;
    if (s == "mean") return MetricMode::Mean;
    throw std::runtime_error("unknown metric_mode: " + s);
}

}  // namespace

TaskSpec TaskSpec::from_json_text(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    TaskSpec task;
    task.name = j.at("name").get<std::string>();
    task.similarity_kind = similarity_kind_from(j.value("similarity_kind", std::string("levenshtein")));
    if (j.contains("metric_mode")) task.metric_mode = metric_mode_from(j["metric_mode"].get<std::string>());
    task.budget = j.value("budget", 10000L);
    if (j.contains("threshold")) task.threshold = j["threshold"].get<double>();
    if (j.contains("external_oracle")) {
        ExternalOracleConfig cfg;
        cfg.command = j["external_oracle"].at("command").get<std::string>();
        cfg.timeout_s = j["external_oracle"].value("timeout_s", 30.0);
        task.external_oracle = cfg;
    }

    // Targets are re-canonicalized here so Levenshtein references share this
    // module's canonical convention regardless of how they were written.
    std::set<std::string> distinct;
    for (const auto& t : j.at("targets")) {
        const auto graph = smiles::parse_smiles(t.get<std::string>());
        const std::string canon = smiles::canonical_smiles(graph);
        if (!distinct.insert(canon).second)
            throw std::runtime_error("task '" + task.name + "' has duplicate target: " + canon);
        task.targets.push_back(canon);
        task.target_fps.push_back(smiles::morgan_fingerprint(graph));
    }
    if (task.targets.empty()) throw std::runtime_error("task '" + task.name + "' has no targets");
    return task;
}

TaskSpec TaskSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open task file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::vector<double> TaskSpec::similarities(const std::string& canonical,
                                           const smiles::MolGraph& graph) const {
    std::vector<double> sims;
    sims.reserve(targets.size());
    if (similarity_kind == SimilarityKind::Levenshtein) {
        for (const auto& t : targets) sims.push_back(levenshtein_similarity(canonical, t));
    } else {
        const auto fp = smiles::morgan_fingerprint(graph);
        for (const auto& tfp : target_fps) sims.push_back(smiles::Fingerprint::tanimoto(fp, tfp));
    }
    return sims;
}

MoleculeScore score_molecule(const std::string& smiles_str, const TaskSpec& task,
                             ExternalOracle* external) {
    MoleculeScore out;
    out.sims.assign(task.targets.size(), 0.0);
    smiles::MolGraph graph;
    try {
        graph = smiles::parse_smiles(smiles_str);
        out.canonical = smiles::canonical_smiles(graph);
    } catch (const smiles::ParseError&) {
        return out;  // invalid: reward 0, budget consumed by the caller
    }
    out.valid = true;
    out.sims = task.similarities(out.canonical, graph);
    if (external != nullptr)
        out.reward = external->score(out.canonical);
    else
        out.reward = *std::max_element(out.sims.begin(), out.sims.end());
    return out;
}

double task_reward(const std::string& smiles_str, const TaskSpec& task) {
    return score_molecule(smiles_str, task).reward;
}

}  // namespace molexp::oracle
