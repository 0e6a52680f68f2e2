#include "vinemeta/data.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace vinemeta {

namespace {
const char* kHeader = "study,y101,y011,y111,y001,y100,y010,y110,y000";
}

void StudyTable::validate() const {
    for (int c : diseased)
        if (c < 0) throw DataError("study " + id + ": negative count");
    for (int c : non_diseased)
        if (c < 0) throw DataError("study " + id + ": negative count");
    if (n1() == 0 && n0() == 0)
        throw DataError("study " + id + ": both arms empty");
}

std::vector<StudyTable> parse_study_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty data file");
    // Tolerate trailing whitespace/CR in the header.
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line != kHeader)
        throw DataError(std::string("bad header; expected: ") + kHeader);

    std::vector<StudyTable> studies;
    std::set<std::string> ids;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 9)
            throw DataError("line " + std::to_string(lineno) + ": expected 9 fields");
        StudyTable st;
        st.id = fields[0];
        if (!ids.insert(st.id).second)
            throw DataError("line " + std::to_string(lineno) + ": duplicate study id '" +
                            st.id + "'");
        try {
            for (int j = 0; j < 4; ++j) st.diseased[j] = std::stoi(fields[1 + j]);
            for (int j = 0; j < 4; ++j) st.non_diseased[j] = std::stoi(fields[5 + j]);
        } catch (const std::exception&) {
            throw DataError("line " + std::to_string(lineno) + ": malformed count");
        }
        try {
            st.validate();
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(lineno) + ": " + e.what());
        }
        studies.push_back(st);
    }
    return studies;
}

std::vector<StudyTable> read_study_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return parse_study_csv(in);
}

void write_study_csv(const std::string& path, const std::vector<StudyTable>& studies) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << kHeader << "\n";
    for (const auto& st : studies) {
        out << st.id;
        for (int c : st.diseased) out << ',' << c;
        for (int c : st.non_diseased) out << ',' << c;
        out << "\n";
    }
}

}  // namespace vinemeta
