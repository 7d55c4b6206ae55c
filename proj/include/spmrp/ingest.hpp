#ifndef SPMRP_INGEST_HPP
#define SPMRP_INGEST_HPP

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace spmrp {

// Canonical strata levels and county roster. Education order is the
// smoothing order for the random-walk term.
struct StrataScheme {
  std::vector<std::string> age_levels;
  std::vector<std::string> edu_levels;
  std::vector<std::string> sexes;
  std::vector<std::string> county_ids;  // 5-digit FIPS, leading zeros kept

  int I() const { return static_cast<int>(county_ids.size()); }
  int J() const { return static_cast<int>(age_levels.size()); }
  int K() const { return static_cast<int>(edu_levels.size()); }
  int n_cells() const { return I() * J() * K(); }
  int cell_index(int i, int j, int k) const { return (i * J() + j) * K() + k; }

  int county_index(const std::string& fips) const;
  int age_index(const std::string& label) const;
  int edu_index(const std::string& label) const;
  int sex_index(const std::string& label) const;

  void validate() const;  // throws InputError on violated invariants

  static StrataScheme california(std::vector<std::string> county_ids);
  static std::vector<std::string> default_age_levels();
  static std::vector<std::string> default_edu_levels();
};

struct Cell {
  long n = 0;
  long y = 0;
  bool observed = false;
};

// Survey observations for one sex, dense over (county, age, education).
struct CellTable {
  std::string sex;
  std::vector<Cell> cells;  // scheme.n_cells() entries, cell_index order

  const Cell& at(const StrataScheme& s, int i, int j, int k) const {
    return cells[s.cell_index(i, j, k)];
  }
  int n_observed() const;
};

// Census counts per (county, age, education, sex) plus derived totals.
struct PoststratTable {
  std::vector<std::int64_t> counts;            // index: cell_index * n_sex + sex
  std::vector<std::int64_t> county_totals;     // index: county * n_sex + sex
  std::vector<std::int64_t> state_total;       // per sex
  std::vector<std::size_t> rows_per_sex;       // parse report
  int n_sexes = 2;

  std::int64_t count(const StrataScheme& s, int i, int j, int k, int sex) const {
    return counts[static_cast<std::size_t>(s.cell_index(i, j, k)) * n_sexes + sex];
  }
  std::int64_t county_total(int i, int sex) const { return county_totals[i * n_sexes + sex]; }
};

// Symmetric first-order contiguity graph over the scheme's counties.
struct AdjacencyGraph {
  std::vector<std::string> node_ids;
  std::set<std::pair<int, int>> edges;  // normalized a < b
  std::vector<int> component_of;        // per node
  int n_components = 0;

  int n_nodes() const { return static_cast<int>(node_ids.size()); }
  int degree(int i) const;
  bool adjacent(int a, int b) const;
  std::vector<std::vector<int>> components() const;
};

struct BaselineRow {
  std::string county_id;
  std::int64_t doses = 0;
  std::int64_t population = 0;
  double proportion = 0.0;  // recomputed doses/population
};

struct BaselineTable {
  std::vector<BaselineRow> rows;
  const BaselineRow* find(const std::string& county_id) const;
};

enum class Axis { Age, Edu, Sex, County };

// Alias -> canonical label map per axis; lookups are case- and
// whitespace-insensitive.
struct AliasMap {
  std::map<std::string, std::string> age, edu, sex, county;

  static AliasMap defaults();
  static AliasMap from_json_file(const std::string& path);
  const std::map<std::string, std::string>& axis_map(Axis axis) const;
};

std::string harmonize(const std::string& raw_label, Axis axis, const AliasMap& mapping);

CellTable parse_survey_cells(std::istream& in, const StrataScheme& scheme, const std::string& sex,
                             const AliasMap* aliases = nullptr);
PoststratTable parse_poststrat(std::istream& in, const StrataScheme& scheme,
                               const AliasMap* aliases = nullptr);
AdjacencyGraph parse_adjacency(std::istream& in, const StrataScheme& scheme);
BaselineTable parse_baseline(std::istream& in);

CellTable parse_survey_cells_file(const std::string& path, const StrataScheme& scheme,
                                  const std::string& sex, const AliasMap* aliases = nullptr);
PoststratTable parse_poststrat_file(const std::string& path, const StrataScheme& scheme,
                                    const AliasMap* aliases = nullptr);
AdjacencyGraph parse_adjacency_file(const std::string& path, const StrataScheme& scheme);
BaselineTable parse_baseline_file(const std::string& path);

// County ids present in a poststrat CSV, sorted; used to derive a scheme.
std::vector<std::string> poststrat_county_ids(const std::string& path);

std::string serialize_survey_cells(const CellTable& table, const StrataScheme& scheme);
std::string serialize_poststrat(const PoststratTable& table, const StrataScheme& scheme);
std::string serialize_adjacency(const AdjacencyGraph& graph);
std::string serialize_baseline(const BaselineTable& table);

}  // namespace spmrp

#endif
