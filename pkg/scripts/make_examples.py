"""
示例数据生成脚本
Regenerate the shipped files under data/ from the reference flag triple.
"""

import os
import sys
import logging
from pathlib import Path

# 添加项目根目录到Python路径
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from flagcoords.io_formats import (  # noqa: E402
    DecorationFile,
    LoopsFile,
    MDecorationFile,
    TriangulationFile,
    write_model,
)
from flagcoords.random_instances import reference_instance  # noqa: E402
from flagcoords.representation_builder import TORUS_RELATION, standard_torus_loops  # noqa: E402
from flagcoords.surface_complex import (  # noqa: E402
    project_to_m,
    standard_torus,
    thrice_punctured_sphere,
    validate_decoration,
)

# 配置日志
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def main() -> int:
    for name, t in (("torus", standard_torus()), ("sphere3", thrice_punctured_sphere())):
        instance = reference_instance(t)
        report = validate_decoration(t, instance.decoration)
        if not report.passed:
            logger.error("%s example fails validation: %s", name, report.failures())
            return 1
        write_model(DATA_DIR / f"{name}.json", TriangulationFile.from_triangulation(t))
        write_model(DATA_DIR / f"{name}_decoration.json", DecorationFile.from_decoration(instance.decoration))
        if name == "torus":
            md = project_to_m(instance.decoration, t)
            write_model(DATA_DIR / "torus_mdecoration.json", MDecorationFile.from_mdecoration(md))
            loops = LoopsFile(generators={k: [list(s) for s in v] for k, v in standard_torus_loops().items()},
                              relation=[list(x) for x in TORUS_RELATION])
            write_model(DATA_DIR / "torus_loops.json", loops)
        logger.info("wrote %s example", name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
