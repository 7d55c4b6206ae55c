#include "spmrp/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spmrp/csv.hpp"
#include "spmrp/errors.hpp"

namespace spmrp {

namespace {

int lookup(const std::vector<std::string>& levels, const std::string& label,
           const char* axis_name, std::size_t row) {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i] == label) return static_cast<int>(i);
  throw InputError(std::string("unknown ") + axis_name + " label '" + label + "' at row " +
                   std::to_string(row + 2) + " (column '" + axis_name + "')");
}

// Plain edit distance, for the near-miss hints in harmonize errors.
int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

void check_unique(const std::vector<std::string>& labels, const char* axis) {
  std::set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second)
      throw InputError(std::string("duplicate ") + axis + " label '" + l + "'");
}

}  // namespace

int StrataScheme::county_index(const std::string& fips) const {
  for (std::size_t i = 0; i < county_ids.size(); ++i)
    if (county_ids[i] == fips) return static_cast<int>(i);
  throw InputError("unknown county FIPS '" + fips + "'");
}

int StrataScheme::age_index(const std::string& label) const {
  return lookup(age_levels, label, "age", 0);
}

int StrataScheme::edu_index(const std::string& label) const {
  return lookup(edu_levels, label, "education", 0);
}

int StrataScheme::sex_index(const std::string& label) const {
  for (std::size_t i = 0; i < sexes.size(); ++i)
    if (sexes[i] == label) return static_cast<int>(i);
  throw InputError("unknown sex label '" + label + "'");
}

void StrataScheme::validate() const {
  if (J() < 2) throw InputError("scheme: need at least 2 age levels");
  if (K() < 2) throw InputError("scheme: need at least 2 education levels");
  if (I() < 1) throw InputError("scheme: need at least 1 county");
  if (sexes.size() != 2) throw InputError("scheme: expected exactly 2 sexes");
  check_unique(age_levels, "age");
  check_unique(edu_levels, "education");
  check_unique(sexes, "sex");
  check_unique(county_ids, "county");
}

std::vector<std::string> StrataScheme::default_age_levels() {
  return {"18-24", "25-64", "65+"};
}

std::vector<std::string> StrataScheme::default_edu_levels() {
  return {"less_than_high_school", "high_school", "some_college",
          "associates", "bachelors", "professional_or_graduate"};
}

StrataScheme StrataScheme::california(std::vector<std::string> county_ids) {
  StrataScheme s;
  s.age_levels = default_age_levels();
  s.edu_levels = default_edu_levels();
  s.sexes = {"F", "M"};
  s.county_ids = std::move(county_ids);
  s.validate();
  return s;
}

int CellTable::n_observed() const {
  int n = 0;
  for (const auto& c : cells) n += c.observed ? 1 : 0;
  return n;
}

int AdjacencyGraph::degree(int i) const {
  int d = 0;
  for (const auto& e : edges) d += (e.first == i || e.second == i) ? 1 : 0;
  return d;
}

bool AdjacencyGraph::adjacent(int a, int b) const {
  if (a > b) std::swap(a, b);
  return edges.count({a, b}) > 0;
}

std::vector<std::vector<int>> AdjacencyGraph::components() const {
  std::vector<std::vector<int>> out(n_components);
  for (int i = 0; i < n_nodes(); ++i) out[component_of[i]].push_back(i);
  return out;
}

const BaselineRow* BaselineTable::find(const std::string& county_id) const {
  for (const auto& r : rows)
    if (r.county_id == county_id) return &r;
  return nullptr;
}

const std::map<std::string, std::string>& AliasMap::axis_map(Axis axis) const {
  switch (axis) {
    case Axis::Age: return age;
    case Axis::Edu: return edu;
    case Axis::Sex: return sex;
    default: return county;
  }
}

AliasMap AliasMap::defaults() {
  AliasMap m;
  m.age = {
      {"18-24", "18-24"},          {"18-24 years", "18-24"},
      {"18 to 24 years", "18-24"}, {"25-64", "25-64"},
      {"25-64 years", "25-64"},    {"25 to 64 years", "25-64"},
      {"65+", "65+"},              {"65 years and over", "65+"},
      {"65 and over", "65+"},      {"65+ years", "65+"},
  };
  m.edu = {
      {"less_than_high_school", "less_than_high_school"},
      {"less than high school", "less_than_high_school"},
      {"high_school", "high_school"},
      {"high school or equivalent", "high_school"},
      {"high school", "high_school"},
      {"some_college", "some_college"},
      {"some college", "some_college"},
      {"associates", "associates"},
      {"associate's degree", "associates"},
      {"associates degree", "associates"},
      {"bachelors", "bachelors"},
      {"bachelor's degree", "bachelors"},
      {"bachelors degree", "bachelors"},
      {"professional_or_graduate", "professional_or_graduate"},
      {"professional or graduate degree", "professional_or_graduate"},
      {"graduate degree", "professional_or_graduate"},
  };
  m.sex = {{"f", "F"}, {"female", "F"}, {"m", "M"}, {"male", "M"}};
  return m;
}

AliasMap AliasMap::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open alias file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("alias file " + path + ": " + e.what());
  }
  AliasMap m;
  auto load = [&](const char* key, std::map<std::string, std::string>& dst) {
    if (!j.contains(key)) return;
    for (auto& [alias, canon] : j.at(key).items())
      dst[normalize_label(alias)] = canon.get<std::string>();
  };
  // normalize keys of the defaults path too
  load("age", m.age);
  load("edu", m.edu);
  load("sex", m.sex);
  load("county", m.county);
  return m;
}

std::string harmonize(const std::string& raw_label, Axis axis, const AliasMap& mapping) {
  const auto& table = mapping.axis_map(axis);
  const std::string key = normalize_label(raw_label);
  auto it = table.find(key);
  if (it != table.end()) return it->second;
  // rank aliases by edit distance for the error message
  std::vector<std::pair<int, std::string>> near;
  for (const auto& [alias, canon] : table) near.emplace_back(edit_distance(key, alias), alias);
  std::sort(near.begin(), near.end());
  std::string hint;
  for (std::size_t i = 0; i < near.size() && i < 3; ++i)
    hint += (i ? ", " : "") + near[i].second;
  throw InputError("unmapped label '" + raw_label + "'; nearest candidates: " + hint);
}

namespace {

std::string resolve(const std::string& raw, Axis axis, const AliasMap* aliases) {
  if (!aliases) return trim(raw);
  const auto& table = aliases->axis_map(axis);
  if (table.empty()) return trim(raw);
  return harmonize(raw, axis, *aliases);
}

}  // namespace

CellTable parse_survey_cells(std::istream& in, const StrataScheme& scheme, const std::string& sex,
                             const AliasMap* aliases) {
  const CsvTable csv = CsvTable::read(in);
  CellTable table;
  table.sex = sex;
  table.cells.assign(scheme.n_cells(), Cell{});
  std::set<int> seen;
  for (std::size_t r = 0; r < csv.rows(); ++r) {
    const std::string fips = csv.cell(r, "county_id");
    int i;
    try {
      i = scheme.county_index(fips);
    } catch (const InputError&) {
      throw InputError("unknown county label '" + fips + "' at row " + std::to_string(r + 2) +
                       " (column 'county_id')");
    }
    const int j = lookup(scheme.age_levels, resolve(csv.cell(r, "age"), Axis::Age, aliases),
                         "age", r);
    const int k = lookup(scheme.edu_levels,
                         resolve(csv.cell(r, "education"), Axis::Edu, aliases), "education", r);
    const long n = csv.long_cell(r, "n");
    const long y = csv.long_cell(r, "y");
    if (n < 0 || y < 0)
      throw InputError("negative count at row " + std::to_string(r + 2));
    if (y > n)
      throw InputError("successes y=" + std::to_string(y) + " exceed trials n=" +
                       std::to_string(n) + " at row " + std::to_string(r + 2));
    const int c = scheme.cell_index(i, j, k);
    if (!seen.insert(c).second)
      throw InputError("duplicate cell key (" + fips + ", " + scheme.age_levels[j] + ", " +
                       scheme.edu_levels[k] + ") at row " + std::to_string(r + 2));
    table.cells[c] = Cell{n, y, n > 0};
  }
  return table;
}

PoststratTable parse_poststrat(std::istream& in, const StrataScheme& scheme,
                               const AliasMap* aliases) {
  const CsvTable csv = CsvTable::read(in);
  PoststratTable table;
  table.n_sexes = static_cast<int>(scheme.sexes.size());
  table.counts.assign(static_cast<std::size_t>(scheme.n_cells()) * table.n_sexes, 0);
  table.rows_per_sex.assign(table.n_sexes, 0);
  std::set<std::size_t> seen;
  for (std::size_t r = 0; r < csv.rows(); ++r) {
    const int i = scheme.county_index(csv.cell(r, "county_id"));
    const int j = lookup(scheme.age_levels, resolve(csv.cell(r, "age"), Axis::Age, aliases),
                         "age", r);
    const int k = lookup(scheme.edu_levels,
                         resolve(csv.cell(r, "education"), Axis::Edu, aliases), "education", r);
    const int sx = scheme.sex_index(resolve(csv.cell(r, "sex"), Axis::Sex, aliases));
    const long count = csv.long_cell(r, "count");
    if (count < 0)
      throw InputError("negative population count at row " + std::to_string(r + 2));
    const std::size_t idx = static_cast<std::size_t>(scheme.cell_index(i, j, k)) * table.n_sexes + sx;
    if (!seen.insert(idx).second)
      throw InputError("duplicate poststratification cell at row " + std::to_string(r + 2));
    table.counts[idx] = count;
    ++table.rows_per_sex[sx];
  }
  table.county_totals.assign(static_cast<std::size_t>(scheme.I()) * table.n_sexes, 0);
  table.state_total.assign(table.n_sexes, 0);
  for (int i = 0; i < scheme.I(); ++i)
    for (int j = 0; j < scheme.J(); ++j)
      for (int k = 0; k < scheme.K(); ++k)
        for (int sx = 0; sx < table.n_sexes; ++sx) {
          const auto c = table.count(scheme, i, j, k, sx);
          table.county_totals[i * table.n_sexes + sx] += c;
          table.state_total[sx] += c;
        }
  return table;
}

AdjacencyGraph parse_adjacency(std::istream& in, const StrataScheme& scheme) {
  const CsvTable csv = CsvTable::read(in);
  AdjacencyGraph g;
  g.node_ids = scheme.county_ids;
  for (std::size_t r = 0; r < csv.rows(); ++r) {
    const int a = scheme.county_index(csv.cell(r, "fips_a"));
    const int b = scheme.county_index(csv.cell(r, "fips_b"));
    if (a == b)
      throw InputError("self-loop on county '" + g.node_ids[a] + "' at row " +
                       std::to_string(r + 2));
    g.edges.insert({std::min(a, b), std::max(a, b)});
  }
  // connected components by BFS
  const int n = g.n_nodes();
  g.component_of.assign(n, -1);
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : g.edges) {
    adj[e.first].push_back(e.second);
    adj[e.second].push_back(e.first);
  }
  int comp = 0;
  for (int s = 0; s < n; ++s) {
    if (g.component_of[s] >= 0) continue;
    std::vector<int> stack{s};
    g.component_of[s] = comp;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (g.component_of[v] < 0) {
          g.component_of[v] = comp;
          stack.push_back(v);
        }
    }
    ++comp;
  }
  g.n_components = comp;
  return g;
}

BaselineTable parse_baseline(std::istream& in) {
  const CsvTable csv = CsvTable::read(in);
  const std::string id_col = csv.has_column("county_id") ? "county_id" : "county";
  BaselineTable table;
  for (std::size_t r = 0; r < csv.rows(); ++r) {
    BaselineRow row;
    row.county_id = csv.cell(r, id_col);
    row.doses = csv.long_cell(r, "doses");
    row.population = csv.long_cell(r, "population");
    if (row.doses < 0 || row.population < 0)
      throw InputError("negative baseline count at row " + std::to_string(r + 2));
    if (row.population == 0 && row.doses > 0)
      throw InputError("county '" + row.county_id + "' reports " + std::to_string(row.doses) +
                       " doses with zero population (row " + std::to_string(r + 2) + ")");
    row.proportion = row.population > 0
                         ? static_cast<double>(row.doses) / static_cast<double>(row.population)
                         : 0.0;
    table.rows.push_back(std::move(row));
  }
  return table;
}

CellTable parse_survey_cells_file(const std::string& path, const StrataScheme& scheme,
                                  const std::string& sex, const AliasMap* aliases) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open survey file: " + path);
  return parse_survey_cells(in, scheme, sex, aliases);
}

PoststratTable parse_poststrat_file(const std::string& path, const StrataScheme& scheme,
                                    const AliasMap* aliases) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open poststratification file: " + path);
  return parse_poststrat(in, scheme, aliases);
}

AdjacencyGraph parse_adjacency_file(const std::string& path, const StrataScheme& scheme) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open adjacency file: " + path);
  return parse_adjacency(in, scheme);
}

BaselineTable parse_baseline_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open baseline file: " + path);
  return parse_baseline(in);
}

std::vector<std::string> poststrat_county_ids(const std::string& path) {
  const CsvTable csv = CsvTable::read_file(path);
  std::set<std::string> ids;
  for (std::size_t r = 0; r < csv.rows(); ++r) ids.insert(csv.cell(r, "county_id"));
  return {ids.begin(), ids.end()};
}

std::string serialize_survey_cells(const CellTable& table, const StrataScheme& scheme) {
  std::ostringstream out;
  out << "county_id,age,education,n,y\n";
  for (int i = 0; i < scheme.I(); ++i)
    for (int j = 0; j < scheme.J(); ++j)
      for (int k = 0; k < scheme.K(); ++k) {
        const Cell& c = table.at(scheme, i, j, k);
        if (!c.observed) continue;
        out << scheme.county_ids[i] << ',' << scheme.age_levels[j] << ','
            << scheme.edu_levels[k] << ',' << c.n << ',' << c.y << '\n';
      }
  return out.str();
}

std::string serialize_poststrat(const PoststratTable& table, const StrataScheme& scheme) {
  std::ostringstream out;
  out << "county_id,age,education,sex,count\n";
  for (int i = 0; i < scheme.I(); ++i)
    for (int j = 0; j < scheme.J(); ++j)
      for (int k = 0; k < scheme.K(); ++k)
        for (int sx = 0; sx < table.n_sexes; ++sx)
          out << scheme.county_ids[i] << ',' << scheme.age_levels[j] << ','
              << scheme.edu_levels[k] << ',' << scheme.sexes[sx] << ','
              << table.count(scheme, i, j, k, sx) << '\n';
  return out.str();
}

std::string serialize_adjacency(const AdjacencyGraph& graph) {
  std::ostringstream out;
  out << "fips_a,fips_b\n";
  for (const auto& e : graph.edges)
    out << graph.node_ids[e.first] << ',' << graph.node_ids[e.second] << '\n';
  return out.str();
}

std::string serialize_baseline(const BaselineTable& table) {
  std::ostringstream out;
  out << "county_id,doses,population\n";
  for (const auto& r : table.rows)
    out << r.county_id << ',' << r.doses << ',' << r.population << '\n';
  return out.str();
}

}  // namespace spmrp
