#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace vinemeta {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One primary study: the eight cross-classified counts y_{jkt}.
/// Cell order within an arm follows the 4x2 table rows: (+-), (-+), (++), (--).
struct StudyTable {
    std::string id;
    std::array<int, 4> diseased{};      // y101, y011, y111, y001
    std::array<int, 4> non_diseased{};  // y100, y010, y110, y000

    int n1() const { return diseased[0] + diseased[1] + diseased[2] + diseased[3]; }
    int n0() const {
        return non_diseased[0] + non_diseased[1] + non_diseased[2] + non_diseased[3];
    }
    void validate() const;
};

/// CSV with header `study,y101,y011,y111,y001,y100,y010,y110,y000`.
std::vector<StudyTable> read_study_csv(const std::string& path);
std::vector<StudyTable> parse_study_csv(std::istream& in);
void write_study_csv(const std::string& path, const std::vector<StudyTable>& studies);

}  // namespace vinemeta
