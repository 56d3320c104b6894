import logging
import os

from flask import Flask, jsonify

from src.models.run import db
from src.routes.lab import lab_bp

logger = logging.getLogger(__name__)


def create_app(config_name=None):
    app = Flask(__name__)
    app.config.from_object(config_name or 'config.Config')

    app.register_blueprint(lab_bp, url_prefix='/api/lab')

    uri = app.config['SQLALCHEMY_DATABASE_URI']
    if uri.startswith('sqlite:///') and ':memory:' not in uri:
        os.makedirs(os.path.dirname(uri[len('sqlite:///'):]), exist_ok=True)

    db.init_app(app)
    with app.app_context():
        db.create_all()

    @app.route('/health')
    def health():
        return jsonify({'status': 'ok'})

    logger.info(f"MTM lab app created with {config_name or 'config.Config'}")
    return app


if __name__ == '__main__':
    app = create_app()
    app.run(host='0.0.0.0', port=int(os.getenv('PORT', 5000)), debug=False)
