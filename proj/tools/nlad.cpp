#include <nlad/cli/app.hpp>

int main(int argc, char** argv)
{
    return nlad::cli::run(argc, argv);
}
