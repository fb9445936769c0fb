#include "ltv/pipeline.hpp"

#include <fstream>

#include "ltv/csv.hpp"

namespace ltv {

std::vector<TabInteraction> load_logs_csv(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw std::runtime_error("io-failure: cannot open " + path);
    std::string header;
    std::getline(probe, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    probe.close();
    if (header != "t,user_id,state_repr,item_id,reward" &&
        header != "t,user_id,state_repr,item_id,converted")
        throw std::runtime_error("io-failure: bad header in " + path);
    auto rows = csv::read_rows(path, header);
    std::vector<TabInteraction> logs;
    logs.reserve(rows.size());
    for (const auto& r : rows)
        logs.push_back({std::stoi(r[0]), std::stoll(r[1]), std::stoi(r[2]), std::stoi(r[3]),
                        std::stod(r[4])});
    return logs;
}

void save_logs_csv(const std::vector<TabInteraction>& logs, const std::string& path,
                   bool converted_header) {
    csv::Writer w(path, converted_header ? "t,user_id,state_repr,item_id,converted"
                                         : "t,user_id,state_repr,item_id,reward");
    for (const auto& rec : logs) w.row(rec.t, rec.user_id, rec.s, rec.a, rec.r);
}

void save_tuples_csv(const std::vector<TabTuple>& tuples, const std::string& path) {
    csv::Writer w(path, "s,a,r,s_next,a_next,tau,terminal");
    for (const auto& d : tuples) {
        if (d.terminal)
            w.row(d.s, d.a, d.r, -1, -1, 0, 1);
        else
            w.row(d.s, d.a, d.r, d.s2, d.a2, d.tau, 0);
    }
}

}  // namespace ltv
