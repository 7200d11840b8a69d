"""
Manifiesto CSV de cada tarea
"""
import csv
import os
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from ecgforge.errors import ParseError

PAGE_COLUMNS = ('id', 'record_id', 'layout', 'split', 'seed')
CROP_COLUMNS = (
    'id', 'record_id', 'lead', 'rhythm', 'layout', 'split', 'seed', 'overlap',
    'image', 'mask_png', 'mask_bmp', 'signal',
    'crop_x', 'crop_y', 'crop_w', 'crop_h', 'baseline_y', 'x0',
    'px_per_box', 'seconds_per_box', 'mv_per_box',
)

TASK_COLUMNS = {
    'digitization': PAGE_COLUMNS + ('image', 'signal'),
    'detection': PAGE_COLUMNS + ('image', 'label'),
    'segmentation': CROP_COLUMNS,
    'overlap': CROP_COLUMNS,
    'verify': ('id', 'record_id', 'lead', 'layout', 'r', 'rmse_mV', 'gap_columns'),
}

PATH_COLUMNS = ('image', 'signal', 'label', 'mask_png', 'mask_bmp')
MANIFEST_NAME = 'manifest.csv'


@dataclass
class Manifest:
    task: str
    columns: Tuple[str, ...]
    rows: List[Dict[str, str]] = field(default_factory=list)

    @classmethod
    def for_task(cls, task):
        return cls(task=task, columns=TASK_COLUMNS[task])

    def add(self, row):
        self.rows.append({column: '' if row.get(column) is None else str(row[column]) for column in self.columns})

    def sorted(self):
        return Manifest(self.task, self.columns, sorted(self.rows, key=lambda row: row['id']))

    def files(self):
        """Rutas relativas de todos los archivos referenciados"""
        return [
            row[column]
            for row in self.rows
            for column in PATH_COLUMNS
            if column in self.columns and row[column]
        ]

    def write(self, path):
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as manifest_file:
            manifest_file.write(f"# task={self.task}\n")
            writer = csv.DictWriter(manifest_file, fieldnames=self.columns, lineterminator='\n')
            writer.writeheader()
            writer.writerows(self.rows)
        return path

    @classmethod
    def read(cls, path):
        with open(path, 'r', encoding='utf-8', newline='') as manifest_file:
            first = manifest_file.readline().strip()
            if not first.startswith('# task='):
                raise ParseError(f"{path} no es un manifiesto de ECGForge", line=1)
            task = first[len('# task='):]
            reader = csv.DictReader(manifest_file)
            rows = list(reader)
            columns = tuple(reader.fieldnames or ())
        return cls(task=task, columns=columns, rows=rows)
